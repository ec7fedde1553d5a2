import type { PoseJson, Scene, TimedPathJson } from "./types.js";

// Fixed palette so candidate 0 is always the same color across redraws.
export const CANDIDATE_COLORS = ["#1f77b4", "#2ca02c", "#9467bd", "#17becf", "#bcbd22"];
const OBSTACLE_FILL = "#8b5a2b"; // brown blocks, named
const UNREACHABLE_FILL = "rgba(120, 120, 120, 0.35)";
const AGENT_COLORS: Record<string, string> = { cape: "#d62728", scripted: "#ff7f0e" };
const EDITED_PATH_COLOR = "#d62728";

export interface RenderOptions {
  // overrides the target's committed path, e.g. right after an edit
  editedPath?: [number, number][];
  selectedCandidate?: number;
}

export class SchemaError extends Error {}

function checkScene(scene: Scene): void {
  if (
    !scene ||
    typeof scene.version !== "number" ||
    !scene.map ||
    typeof scene.map.width !== "number" ||
    typeof scene.map.height !== "number" ||
    !Array.isArray(scene.map.obstacles) ||
    !scene.agents ||
    !scene.candidates
  ) {
    throw new SchemaError("scene payload does not match the expected schema");
  }
}

function pathPoints(path: TimedPathJson): [number, number][] {
  return path.waypoints.map((w) => [w.pose.x, w.pose.y]);
}

function drawPolyline(
  ctx: CanvasRenderingContext2D,
  points: [number, number][],
  scale: number,
): void {
  if (points.length === 0) return;
  ctx.beginPath();
  ctx.moveTo(points[0][0] * scale, points[0][1] * scale);
  for (const [x, y] of points.slice(1)) ctx.lineTo(x * scale, y * scale);
  ctx.stroke();
}

function drawAgent(
  ctx: CanvasRenderingContext2D,
  pose: PoseJson,
  radius: number,
  color: string,
  scale: number,
): void {
  const r = Math.max(radius * scale, 3);
  ctx.fillStyle = color;
  ctx.beginPath();
  ctx.arc(pose.x * scale, pose.y * scale, r, 0, 2 * Math.PI);
  ctx.fill();
  // heading tick: theta 0 faces +x, positive clockwise, +y down
  const rad = (pose.theta * Math.PI) / 180;
  ctx.strokeStyle = color;
  ctx.beginPath();
  ctx.moveTo(pose.x * scale, pose.y * scale);
  ctx.lineTo(
    (pose.x + Math.cos(rad) * radius * 2) * scale,
    (pose.y + Math.sin(rad) * radius * 2) * scale,
  );
  ctx.stroke();
}

// Draws exactly the scene payload: obstacles, unreachable regions, candidate
// paths (distinct colors + index labels), predicted paths (dashed), agents
// (distinct markers with heading). +x right, +y down, like the service.
export function renderScene(
  canvas: HTMLCanvasElement,
  scene: Scene,
  options: RenderOptions = {},
): void {
  checkScene(scene);
  const ctx = canvas.getContext("2d");
  if (!ctx) throw new Error("2d canvas context unavailable");
  const scale = Math.min(canvas.width / scene.map.width, canvas.height / scene.map.height);

  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.fillStyle = "#fafafa";
  ctx.fillRect(0, 0, scene.map.width * scale, scene.map.height * scale);

  for (const region of scene.map.unreachable ?? []) {
    ctx.fillStyle = UNREACHABLE_FILL;
    ctx.fillRect(region.x * scale, region.y * scale, region.w * scale, region.h * scale);
  }

  ctx.font = "11px sans-serif";
  for (const obs of scene.map.obstacles) {
    ctx.fillStyle = OBSTACLE_FILL;
    ctx.fillRect(obs.x * scale, obs.y * scale, obs.w * scale, obs.h * scale);
    ctx.fillStyle = "#ffffff";
    ctx.fillText(obs.name, (obs.x + 2) * scale, (obs.y + obs.h / 2) * scale);
  }

  scene.candidates.candidates.forEach((candidate, i) => {
    const points = pathPoints(candidate.path);
    ctx.setLineDash([]);
    ctx.lineWidth = i === (options.selectedCandidate ?? -1) ? 3 : 1.5;
    ctx.strokeStyle = CANDIDATE_COLORS[i % CANDIDATE_COLORS.length];
    drawPolyline(ctx, points, scale);
    if (points.length > 0) {
      ctx.fillStyle = ctx.strokeStyle;
      const mid = points[Math.floor(points.length / 2)];
      ctx.fillText(String(i), mid[0] * scale + 4, mid[1] * scale - 4);
    }
  });

  ctx.setLineDash([6, 4]);
  ctx.lineWidth = 1.5;
  for (const [agentId, path] of Object.entries(scene.predicted_others)) {
    ctx.strokeStyle = "#7f7f7f";
    const points = pathPoints(path);
    drawPolyline(ctx, points, scale);
    if (points.length > 0) {
      ctx.fillStyle = "#7f7f7f";
      ctx.fillText(agentId, points[0][0] * scale + 4, points[0][1] * scale + 12);
    }
  }
  ctx.setLineDash([]);

  if (options.editedPath && options.editedPath.length > 0) {
    ctx.lineWidth = 3;
    ctx.strokeStyle = EDITED_PATH_COLOR;
    drawPolyline(ctx, options.editedPath, scale);
  }

  for (const [agentId, agent] of Object.entries(scene.agents)) {
    const color = AGENT_COLORS[agent.policy] ?? "#333333";
    drawAgent(ctx, agent.pose, agent.body.radius, color, scale);
    ctx.fillStyle = color;
    ctx.fillText(
      agentId,
      agent.pose.x * scale + agent.body.radius * scale + 3,
      agent.pose.y * scale,
    );
  }
}
