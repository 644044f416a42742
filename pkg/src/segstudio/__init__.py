"""Manual-segmentation toolkit: volumes, contours, masks, metrics.

Core flow: parse an NRRD volume, collect closed per-slice contours
(exchanged as legacy VTK polydata plus a JSON grid sidecar), rasterize
them into a binary mask on the same grid, and compare masks with Dice
and Hausdorff.  A CLI (`seg`) and an HTTP job service wrap the library.
"""

from .errors import (
    BadMagicError,
    EmptyMaskError,
    EmptySetError,
    GeometryMismatchError,
    MalformedError,
    NotPlanarError,
    OutOfGridError,
    SegError,
    SelfIntersectingError,
    SingularGeometryError,
    SizeMismatchError,
    UnknownBasisError,
    UnsupportedFieldError,
)
from .metrics import (
    MetricReport,
    boundary_voxels,
    build_report,
    dice,
    dice_with_warnings,
    hausdorff,
    render_report,
    report_dict,
)
from .nrrd import (
    NrrdHeader,
    extract_meta,
    parse_nrrd,
    parse_nrrd_full,
    scalar_type_name,
    write_nrrd,
)
from .polydata import (
    INDEX_SPACE,
    WORLD_SPACE,
    Contour,
    ContourSet,
    MetaDescriptor,
    PolyData,
    contours_from_polydata,
    parse_meta_json,
    parse_polydata,
    polydata_mode,
    write_meta_json,
    write_polydata,
)
from .rasterize import (
    BOUNDARY_TOL,
    BoundingBox,
    ProgressSink,
    RasterizeOptions,
    Triangle2D,
    build_blank_volume,
    compute_bounding_box,
    contour_is_simple,
    point_in_polygon,
    rasterize,
    triangulate,
)
from .server import Job, JobRegistry, ServiceConfig, create_app
from .volume import (
    LPS,
    RAS,
    Mask,
    Volume,
    VolumeGeometry,
    index_to_world,
    reorient_to_ras,
    world_to_index,
)

__version__ = "0.1.0"
