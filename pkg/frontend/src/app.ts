import { SessionClient } from "./api.js";
import { renderProgram } from "./program.js";
import { renderScene, SchemaError } from "./render.js";
import type { Scene } from "./types.js";

// The six instruction templates as clickable chips; {obstacle} is filled
// from the scene so scripted-synthesizer sessions stay in-grammar.
export const TEMPLATE_CHIPS: { label: string; text: string }[] = [
  { label: "move", text: "move forward a bit" },
  { label: "rotate", text: "rotate clockwise by 45 degrees" },
  { label: "pick path", text: "take the path to the left of the {obstacle}" },
  { label: "keep distance", text: "move a bit away from the {obstacle}" },
  { label: "wait", text: "wait here, let me pass first" },
  { label: "back out", text: "back out of the way, let me pass" },
];

export function fillTemplate(text: string, scene: Scene): string {
  const name = scene.map.obstacles[0]?.name ?? "obstacle";
  return text.replace("{obstacle}", name);
}

export interface AppElements {
  canvas: HTMLCanvasElement;
  programPanel: HTMLElement;
  statusBar: HTMLElement;
  tickCounter: HTMLElement;
  instructionInput: HTMLInputElement;
  instructionForm: HTMLFormElement;
  chipBar: HTMLElement;
  stepButton: HTMLButtonElement;
  playButton: HTMLButtonElement;
  pauseButton: HTMLButtonElement;
}

export class App {
  scene: Scene | null = null;
  editedPath: [number, number][] | undefined;
  private client: SessionClient | null = null;
  private playing: number | null = null;
  // user actions serialize through one promise chain
  private queue: Promise<unknown> = Promise.resolve();

  constructor(
    private el: AppElements,
    private base: string,
  ) {
    el.instructionForm.addEventListener("submit", (event) => {
      event.preventDefault();
      const text = el.instructionInput.value.trim();
      if (text) this.enqueue(() => this.submit(text));
    });
    el.stepButton.addEventListener("click", () => this.enqueue(() => this.advance(1)));
    el.playButton.addEventListener("click", () => this.play());
    el.pauseButton.addEventListener("click", () => this.pause());
  }

  private enqueue<T>(action: () => Promise<T>): Promise<T> {
    const next = this.queue.then(action);
    this.queue = next.catch(() => undefined);
    return next;
  }

  async start(archetype: string, index: number, seed: number): Promise<void> {
    const { client, scene } = await SessionClient.create(this.base, {
      archetype: { name: archetype, index, seed },
      seed,
    });
    this.client = client;
    this.applyScene(scene);
    this.subscribe();
  }

  private subscribe(): void {
    if (!this.client || typeof EventSource === "undefined") return;
    const source = new EventSource(this.client.streamUrl());
    source.onmessage = (event) => {
      const payload = JSON.parse(event.data);
      if (payload.kind === "advance") this.enqueue(() => this.refresh());
      if (payload.terminal) source.close();
    };
    source.onerror = () => source.close(); // polling via refresh still works
  }

  applyScene(scene: Scene): void {
    this.scene = scene;
    this.el.tickCounter.textContent = `tick ${scene.tick}`;
    try {
      renderScene(this.el.canvas, scene, {
        editedPath: this.editedPath,
        selectedCandidate: scene.last_outcome?.selected_index,
      });
    } catch (error) {
      if (error instanceof SchemaError) {
        this.setStatus(error.message, "error");
        return;
      }
      throw error;
    }
    if (scene.terminal) this.lockTerminal(scene.terminal);
    this.renderChips(scene);
  }

  private renderChips(scene: Scene): void {
    this.el.chipBar.replaceChildren();
    for (const chip of TEMPLATE_CHIPS) {
      const button = document.createElement("button");
      button.type = "button";
      button.className = "chip";
      button.textContent = chip.label;
      button.addEventListener("click", () => {
        this.el.instructionInput.value = fillTemplate(chip.text, scene);
        this.el.instructionInput.focus();
      });
      this.el.chipBar.appendChild(button);
    }
  }

  async submit(text: string): Promise<void> {
    if (!this.client) return;
    try {
      const outcome = await this.client.submitInstruction(text);
      renderProgram(this.el.programPanel, outcome);
      this.editedPath = outcome.updated_path;
      const scene = await this.client.scene();
      this.applyScene(scene);
      this.el.instructionInput.value = "";
      this.el.instructionInput.focus();
      this.setStatus(
        outcome.degraded ? "instruction not understood; path unchanged" : "path updated",
        outcome.degraded ? "warn" : "ok",
      );
    } catch (error) {
      this.setStatus(String(error), "error");
    }
  }

  async advance(ticks: number): Promise<void> {
    if (!this.client) return;
    try {
      const delta = await this.client.advance(ticks);
      this.editedPath = undefined;
      const scene = await this.client.scene();
      this.applyScene(scene);
      if (delta.terminal) this.lockTerminal(delta.terminal);
    } catch (error) {
      this.pause();
      this.setStatus(String(error), "error");
    }
  }

  private async refresh(): Promise<void> {
    if (!this.client) return;
    this.applyScene(await this.client.scene());
  }

  play(): void {
    if (this.playing !== null) return;
    this.playing = setInterval(
      () => this.enqueue(() => this.advance(1)),
      200,
    ) as unknown as number;
  }

  pause(): void {
    if (this.playing !== null) {
      clearInterval(this.playing);
      this.playing = null;
    }
  }

  private lockTerminal(terminal: string): void {
    this.pause();
    this.el.stepButton.disabled = true;
    this.el.playButton.disabled = true;
    this.el.instructionInput.disabled = true;
    this.setStatus(
      terminal === "success" ? "all agents reached their goals" : "collision: episode failed",
      terminal === "success" ? "ok" : "error",
    );
  }

  setStatus(message: string, kind: "ok" | "warn" | "error"): void {
    this.el.statusBar.textContent = message;
    this.el.statusBar.className = `status ${kind}`;
  }
}

export function collectElements(root: Document): AppElements {
  const get = <T extends Element>(id: string): T => {
    const node = root.getElementById(id);
    if (!node) throw new Error(`missing #${id}`);
    return node as unknown as T;
  };
  return {
    canvas: get<HTMLCanvasElement>("scene"),
    programPanel: get<HTMLElement>("program"),
    statusBar: get<HTMLElement>("status"),
    tickCounter: get<HTMLElement>("tick"),
    instructionInput: get<HTMLInputElement>("instruction"),
    instructionForm: get<HTMLFormElement>("instruction-form"),
    chipBar: get<HTMLElement>("chips"),
    stepButton: get<HTMLButtonElement>("step"),
    playButton: get<HTMLButtonElement>("play"),
    pauseButton: get<HTMLButtonElement>("pause"),
  };
}

export async function boot(root: Document, base = ""): Promise<App> {
  const app = new App(collectElements(root), base);
  const params = new URLSearchParams(root.location?.search ?? "");
  await app.start(
    params.get("archetype") ?? "carry",
    Number(params.get("index") ?? 0),
    Number(params.get("seed") ?? 0),
  );
  return app;
}
