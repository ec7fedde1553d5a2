// Mirrors the service's JSON payloads verbatim; the UI invents no geometry.

export interface PoseJson {
  x: number;
  y: number;
  theta: number;
}

export interface BodyJson {
  radius: number;
  speed: number;
}

export interface ObstacleJson {
  name: string;
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface MapJson {
  width: number;
  height: number;
  obstacles: ObstacleJson[];
  unreachable: ObstacleJson[];
}

export interface WaypointJson {
  pose: PoseJson;
  dwell: number;
}

export interface TimedPathJson {
  waypoints: WaypointJson[];
}

export interface CandidateJson {
  path: TimedPathJson;
  signature: number[];
}

export interface CandidateSetJson {
  for_agent: string;
  candidates: CandidateJson[];
}

export interface AgentView {
  pose: PoseJson;
  goal: PoseJson;
  body: BodyJson;
  policy: string;
  path: [number, number][];
}

export interface VerdictJson {
  status: "accepted" | "rejected" | "ignored";
  reason?: string;
  detail?: Record<string, unknown>;
}

export interface InstructionOutcome {
  instruction: string;
  program_text: string;
  verdicts: VerdictJson[];
  accepted_lines: number;
  rejected_lines: number;
  degraded: boolean;
  tokens: number;
  updated_path: [number, number][];
  selected_index: number;
  tick: number;
}

export interface Scene {
  version: number;
  session_id: string;
  tick: number;
  terminal: "success" | "failure" | null;
  collision: Record<string, unknown> | null;
  map: MapJson;
  target: string;
  agents: Record<string, AgentView>;
  candidates: CandidateSetJson;
  predicted_others: Record<string, TimedPathJson>;
  last_outcome: InstructionOutcome | null;
}

export interface AdvanceDelta {
  tick: number;
  poses: Record<string, PoseJson>;
  collision: Record<string, unknown> | null;
  terminal: "success" | "failure" | null;
}

export interface CreateSessionResponse {
  session_id: string;
  scene: Scene;
}
