import { beforeEach, describe, expect, it, vi } from "vitest";

import { App, collectElements, fillTemplate, TEMPLATE_CHIPS } from "../src/app.js";
import type { InstructionOutcome, Scene } from "../src/types.js";
import {
  acceptedWaitOutcome,
  carryScene,
  fakeCanvas,
  FakeContext,
  rejectedEditOutcome,
} from "./fixtures.js";

const WAIT_TEMPLATE = "wait here, let me pass first";

function mountDom(): FakeContext {
  document.body.innerHTML = `
    <canvas id="scene" width="600" height="600"></canvas>
    <div id="program"></div>
    <div id="status" class="status"></div>
    <span id="tick"></span>
    <form id="instruction-form"><input id="instruction" type="text" /></form>
    <div id="chips"></div>
    <button id="step"></button>
    <button id="play"></button>
    <button id="pause"></button>
  `;
  const { ctx } = fakeCanvas();
  const canvas = document.getElementById("scene") as HTMLCanvasElement;
  (canvas as unknown as { getContext: () => unknown }).getContext = () => ctx;
  return ctx;
}

interface ServiceFixture {
  scene: Scene;
  outcome: InstructionOutcome;
  counts: Record<string, number>;
}

function mockService(fixture: ServiceFixture): void {
  fixture.counts = { create: 0, scene: 0, instruction: 0, advance: 0 };
  vi.stubGlobal("fetch", async (url: string, init?: RequestInit) => {
    const respond = (payload: unknown) =>
      new Response(JSON.stringify(payload), { status: 200 });
    if (url.endsWith("/sessions") && init?.method === "POST") {
      fixture.counts.create += 1;
      return respond({ session_id: "s1", scene: fixture.scene });
    }
    if (url.endsWith("/instruction")) {
      fixture.counts.instruction += 1;
      const body = JSON.parse(String(init?.body));
      fixture.outcome = { ...fixture.outcome, instruction: body.text };
      fixture.scene = {
        ...fixture.scene,
        last_outcome: fixture.outcome,
        agents: {
          ...fixture.scene.agents,
          robot: { ...fixture.scene.agents.robot, path: fixture.outcome.updated_path },
        },
      };
      return respond(fixture.outcome);
    }
    if (url.endsWith("/advance")) {
      fixture.counts.advance += 1;
      fixture.scene = { ...fixture.scene, tick: fixture.scene.tick + 1 };
      return respond({
        tick: fixture.scene.tick,
        poses: {},
        collision: null,
        terminal: null,
      });
    }
    if (url.endsWith("/scene")) {
      fixture.counts.scene += 1;
      return respond(fixture.scene);
    }
    return new Response(JSON.stringify({ detail: `no route ${url}` }), { status: 404 });
  });
}

async function bootApp(fixture: ServiceFixture): Promise<{ app: App; ctx: FakeContext }> {
  const ctx = mountDom();
  mockService(fixture);
  const app = new App(collectElements(document), "http://svc");
  await app.start("carry", 0, 0);
  return { app, ctx };
}

describe("interactive session loop", () => {
  beforeEach(() => {
    vi.unstubAllGlobals();
  });

  it("boots a carry session and renders the scene", async () => {
    const fixture = { scene: carryScene(), outcome: acceptedWaitOutcome(), counts: {} };
    const { ctx } = await bootApp(fixture);
    expect(fixture.counts.create).toBe(1);
    expect(ctx.texts()).toContain("table");
    expect(document.getElementById("tick")?.textContent).toBe("tick 0");
    expect(document.querySelectorAll("#chips .chip").length).toBe(TEMPLATE_CHIPS.length);
  });

  it("wait instruction: accepted lines highlighted and path redrawn in one round trip", async () => {
    const fixture = { scene: carryScene(), outcome: acceptedWaitOutcome(), counts: {} };
    const { app, ctx } = await bootApp(fixture);
    ctx.calls = [];

    const input = document.getElementById("instruction") as HTMLInputElement;
    input.value = WAIT_TEMPLATE;
    await app.submit(WAIT_TEMPLATE);

    // exactly one instruction round trip triggered the redraw
    expect(fixture.counts.instruction).toBe(1);
    const accepted = [...document.querySelectorAll("#program li.accepted")];
    expect(accepted.length).toBe(2);
    expect((accepted[1] as HTMLElement).style.color).toBe("green");
    expect(accepted[1].textContent).toContain("wait(");
    // the edited path overlay was stroked onto the canvas
    expect(ctx.ops("stroke").length).toBeGreaterThan(0);
    expect(app.editedPath).toEqual(acceptedWaitOutcome().updated_path);
    expect(document.getElementById("status")?.textContent).toBe("path updated");
  });

  it("rejected edit: strike-through with the verifier reason", async () => {
    const fixture = { scene: carryScene(), outcome: rejectedEditOutcome(), counts: {} };
    const { app } = await bootApp(fixture);
    await app.submit("move forward more");

    const rejected = document.querySelector("#program li.rejected") as HTMLElement;
    expect(rejected).not.toBeNull();
    expect(rejected.style.textDecoration).toBe("line-through");
    expect(rejected.title).toBe("StaticCollision");
    const accepted = document.querySelectorAll("#program li.accepted");
    expect(accepted.length).toBe(1);
  });

  it("playback step advances the tick counter", async () => {
    const fixture = { scene: carryScene(), outcome: acceptedWaitOutcome(), counts: {} };
    const { app } = await bootApp(fixture);
    await app.advance(1);
    expect(fixture.counts.advance).toBe(1);
    expect(document.getElementById("tick")?.textContent).toBe("tick 1");
  });

  it("terminal scenes lock the controls", async () => {
    const fixture = { scene: carryScene(), outcome: acceptedWaitOutcome(), counts: {} };
    const { app } = await bootApp(fixture);
    fixture.scene = { ...fixture.scene, terminal: "success" };
    app.applyScene(fixture.scene);
    expect((document.getElementById("step") as HTMLButtonElement).disabled).toBe(true);
    expect((document.getElementById("instruction") as HTMLInputElement).disabled).toBe(true);
    expect(document.getElementById("status")?.textContent).toContain("reached their goals");
  });

  it("template chips stay in-grammar for the scripted synthesizer", () => {
    const scene = carryScene();
    const filled = TEMPLATE_CHIPS.map((c) => fillTemplate(c.text, scene));
    expect(filled).toContain(WAIT_TEMPLATE);
    expect(filled).toContain("take the path to the left of the table");
    for (const text of filled) expect(text).not.toContain("{obstacle}");
  });
});
