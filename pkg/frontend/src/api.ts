import type { AdvanceDelta, CreateSessionResponse, InstructionOutcome, Scene } from "./types.js";

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`HTTP ${status}: ${detail}`);
  }
}

async function request<T>(url: string, init?: RequestInit): Promise<T> {
  const resp = await fetch(url, {
    headers: { "Content-Type": "application/json" },
    ...init,
  });
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      const body = await resp.json();
      if (typeof body?.detail === "string") detail = body.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(resp.status, detail);
  }
  return (await resp.json()) as T;
}

export class SessionClient {
  constructor(
    private base: string,
    public sessionId: string,
  ) {}

  static async create(
    base: string,
    body: {
      archetype?: { name: string; index?: number; seed?: number };
      scenario?: unknown;
      seed?: number;
      no_verify?: boolean;
      single_path?: boolean;
    },
  ): Promise<{ client: SessionClient; scene: Scene }> {
    const data = await request<CreateSessionResponse>(`${base}/sessions`, {
      method: "POST",
      body: JSON.stringify(body),
    });
    return { client: new SessionClient(base, data.session_id), scene: data.scene };
  }

  private url(path: string): string {
    return `${this.base}/sessions/${this.sessionId}${path}`;
  }

  scene(): Promise<Scene> {
    return request<Scene>(this.url("/scene"));
  }

  submitInstruction(text: string): Promise<InstructionOutcome> {
    return request<InstructionOutcome>(this.url("/instruction"), {
      method: "POST",
      body: JSON.stringify({ text }),
    });
  }

  advance(ticks: number): Promise<AdvanceDelta> {
    return request<AdvanceDelta>(this.url("/advance"), {
      method: "POST",
      body: JSON.stringify({ ticks }),
    });
  }

  streamUrl(): string {
    return this.url("/stream");
  }
}
