/** Typed client for the mask job service HTTP API. */

export type JobState = "created" | "running" | "done" | "failed";

export interface ProgressInfo {
  state: JobState;
  progress: number;
  error?: string;
}

export interface MetricReport {
  dice: number;
  hausdorff_mm: number;
  voxels_a: number;
  voxels_b: number;
  voxels_intersection: number;
  warnings: string[];
}

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string
  ) {
    super(message);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class JobClient {
  private readonly fetchFn: FetchLike;

  constructor(
    readonly baseUrl: string = "",
    fetchFn?: FetchLike
  ) {
    this.fetchFn = fetchFn ?? ((input, init) => globalThis.fetch(input, init));
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    const response = await this.fetchFn(this.baseUrl + path, init);
    if (response.ok) return response;
    let code = "HTTP_ERROR";
    let message = `${response.status} ${response.statusText}`;
    try {
      const body = await response.json();
      if (body?.error?.code) {
        code = body.error.code;
        message = body.error.message ?? message;
      }
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, code, message);
  }

  async createJob(contoursVtk: string, metaJson: string): Promise<string> {
    const form = new FormData();
    form.append("contours", new Blob([contoursVtk]), "contours.vtk");
    form.append("meta", new Blob([metaJson]), "meta.json");
    const response = await this.request("/api/jobs", { method: "POST", body: form });
    return (await response.json()).job_id as string;
  }

  async startMask(jobId: string): Promise<void> {
    await this.request(`/api/jobs/${jobId}/mask`, { method: "POST" });
  }

  async getProgress(jobId: string): Promise<ProgressInfo> {
    const response = await this.request(`/api/jobs/${jobId}/progress`);
    return (await response.json()) as ProgressInfo;
  }

  async downloadMask(jobId: string): Promise<ArrayBuffer> {
    const response = await this.request(`/api/jobs/${jobId}/mask`);
    return response.arrayBuffer();
  }

  /** Start the job, poll progress until it settles, return the mask bytes. */
  async runMaskJob(
    jobId: string,
    onProgress?: (info: ProgressInfo) => void,
    pollMs = 150
  ): Promise<ArrayBuffer> {
    await this.startMask(jobId);
    for (;;) {
      const info = await this.getProgress(jobId);
      onProgress?.(info);
      if (info.state === "done") return this.downloadMask(jobId);
      if (info.state === "failed") {
        throw new ApiError(0, info.error ?? "JOB_FAILED", `mask job failed: ${info.error}`);
      }
      await new Promise((resolve) => setTimeout(resolve, pollMs));
    }
  }

  async compareMasks(a: ArrayBuffer | Blob, b: ArrayBuffer | Blob): Promise<MetricReport> {
    const form = new FormData();
    form.append("a", a instanceof Blob ? a : new Blob([a]), "a.nrrd");
    form.append("b", b instanceof Blob ? b : new Blob([b]), "b.nrrd");
    const response = await this.request("/api/metrics", { method: "POST", body: form });
    return (await response.json()) as MetricReport;
  }
}

/** One-line metric summary as shown in the results panel. */
export function metricsSummary(report: MetricReport): string {
  return `Dice ${report.dice.toFixed(4)} / Hausdorff ${report.hausdorff_mm.toFixed(4)} mm`;
}
