import type { InstructionOutcome, Scene, TimedPathJson } from "../src/types.js";

function path(points: [number, number][]): TimedPathJson {
  return {
    waypoints: points.map(([x, y]) => ({ pose: { x, y, theta: 0 }, dwell: 0 })),
  };
}

// A carry-map scene like the service's `carry` archetype emits at tick 0.
export function carryScene(): Scene {
  return {
    version: 1,
    session_id: "s1",
    tick: 0,
    terminal: null,
    collision: null,
    map: {
      width: 600,
      height: 600,
      obstacles: [
        { name: "table", x: 150, y: 220, w: 120, h: 60 },
        { name: "shelf", x: 380, y: 120, w: 60, h: 160 },
      ],
      unreachable: [],
    },
    target: "robot",
    agents: {
      robot: {
        pose: { x: 60, y: 540, theta: 0 },
        goal: { x: 540, y: 60, theta: 0 },
        body: { radius: 12, speed: 8 },
        policy: "cape",
        path: [
          [60, 540],
          [300, 400],
          [540, 60],
        ],
      },
      human: {
        pose: { x: 60, y: 540, theta: 0 },
        goal: { x: 540, y: 60, theta: 0 },
        body: { radius: 12, speed: 8 },
        policy: "scripted",
        path: [],
      },
    },
    candidates: {
      for_agent: "robot",
      candidates: [
        { path: path([[60, 540], [300, 400], [540, 60]]), signature: [] },
        { path: path([[60, 540], [120, 180], [540, 60]]), signature: [1] },
      ],
    },
    predicted_others: {},
    last_outcome: null,
  };
}

export function acceptedWaitOutcome(): InstructionOutcome {
  return {
    instruction: "wait here, let me pass first",
    program_text: 'select_path(0, "robot")\nwait(1, 4, "robot")',
    verdicts: [{ status: "accepted" }, { status: "accepted" }],
    accepted_lines: 2,
    rejected_lines: 0,
    degraded: false,
    tokens: 0,
    updated_path: [
      [60, 540],
      [300, 400],
      [540, 60],
    ],
    selected_index: 0,
    tick: 0,
  };
}

export function rejectedEditOutcome(): InstructionOutcome {
  return {
    instruction: "move forward more",
    program_text: 'select_path(0, "robot")\nmodify_translation(1, 90, 0, "robot")',
    verdicts: [
      { status: "accepted" },
      { status: "rejected", reason: "StaticCollision", detail: { obstacle: "table" } },
    ],
    accepted_lines: 1,
    rejected_lines: 1,
    degraded: false,
    tokens: 0,
    updated_path: [
      [60, 540],
      [300, 400],
      [540, 60],
    ],
    selected_index: 0,
    tick: 0,
  };
}

// Minimal recording stand-in for CanvasRenderingContext2D.
export class FakeContext {
  calls: { op: string; args: unknown[] }[] = [];
  fillStyle = "";
  strokeStyle = "";
  lineWidth = 1;
  font = "";

  private record(op: string) {
    return (...args: unknown[]) => {
      this.calls.push({ op, args });
    };
  }

  clearRect = this.record("clearRect");
  fillRect = this.record("fillRect");
  beginPath = this.record("beginPath");
  moveTo = this.record("moveTo");
  lineTo = this.record("lineTo");
  stroke = this.record("stroke");
  fill = this.record("fill");
  arc = this.record("arc");
  setLineDash = this.record("setLineDash");

  fillText(text: string, x: number, y: number): void {
    this.calls.push({ op: "fillText", args: [text, x, y] });
  }

  ops(op: string): { op: string; args: unknown[] }[] {
    return this.calls.filter((c) => c.op === op);
  }

  texts(): string[] {
    return this.ops("fillText").map((c) => String(c.args[0]));
  }
}

export function fakeCanvas(width = 600, height = 600): {
  canvas: HTMLCanvasElement;
  ctx: FakeContext;
} {
  const canvas = document.createElement("canvas");
  canvas.width = width;
  canvas.height = height;
  const ctx = new FakeContext();
  (canvas as unknown as { getContext: () => unknown }).getContext = () => ctx;
  return { canvas, ctx };
}
