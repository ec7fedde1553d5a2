import type { InstructionOutcome } from "./types.js";

// Pairs each program line with its verdict; the service emits one verdict
// per non-empty line, in order.
export function programLines(outcome: InstructionOutcome): {
  text: string;
  status: string;
  reason: string | null;
}[] {
  const lines = outcome.program_text
    .split("\n")
    .map((l) => l.trim())
    .filter((l) => l.length > 0);
  return lines.map((text, i) => {
    const verdict = outcome.verdicts[i];
    return {
      text,
      status: verdict?.status ?? "ignored",
      reason: verdict?.reason ?? null,
    };
  });
}

// Renders the synthesized program: accepted lines highlighted green,
// rejected lines struck through with the verifier's reason as a tooltip.
export function renderProgram(panel: HTMLElement, outcome: InstructionOutcome): void {
  panel.replaceChildren();

  if (outcome.degraded) {
    const banner = document.createElement("div");
    banner.className = "banner degraded";
    banner.textContent = "synthesizer degraded: keeping the default path";
    panel.appendChild(banner);
  }

  const list = document.createElement("ol");
  list.className = "program";
  for (const line of programLines(outcome)) {
    const item = document.createElement("li");
    item.textContent = line.text;
    item.className = `line ${line.status}`;
    if (line.status === "accepted") {
      item.style.color = "green";
    } else if (line.status === "rejected") {
      item.style.textDecoration = "line-through";
      if (line.reason) item.title = line.reason;
    }
    list.appendChild(item);
  }
  panel.appendChild(list);

  const summary = document.createElement("div");
  summary.className = "summary";
  summary.textContent =
    `${outcome.accepted_lines} accepted, ${outcome.rejected_lines} rejected` +
    (outcome.selected_index !== null ? ` (path ${outcome.selected_index})` : "");
  panel.appendChild(summary);
}
