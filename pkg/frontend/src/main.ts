/** Workbench entry point: wires the session client, canvas state and
 * controls together. Everything numeric comes from the server. */

import { SessionClient, type Axes, type ModelDocument } from "./api.js";
import { drawArrow, drawHeatmap, drawSketchEdges, drawStartDot } from "./render.js";
import {
  heatmapCells,
  movementArrows,
  snapToNode,
  MutationGate,
  SketchDraft,
  type GridGeometry,
} from "./state.js";

const SERVER = (window as unknown as { TENSIONSPACE_SERVER?: string }).TENSIONSPACE_SERVER
  ?? "http://127.0.0.1:8000";

function element<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

function axesFromPickers(model: ModelDocument): Axes {
  const pick = (axis: "x" | "y") => {
    const [character, theme] = element<HTMLSelectElement>(`${axis}-axis`).value.split(":");
    return { character: character ?? model.characters[0]!.name, theme: theme ?? model.themes[0]! };
  };
  return { x: pick("x"), y: pick("y") };
}

function fillAxisPickers(model: ModelDocument): void {
  for (const axis of ["x", "y"] as const) {
    const select = element<HTMLSelectElement>(`${axis}-axis`);
    select.innerHTML = "";
    for (const character of model.characters) {
      for (const theme of model.themes) {
        const option = document.createElement("option");
        option.value = `${character.name}:${theme}`;
        option.textContent = `${character.name} × ${theme}`;
        select.appendChild(option);
      }
    }
  }
}

async function boot(): Promise<void> {
  const canvas = element<HTMLCanvasElement>("space");
  const ctx = canvas.getContext("2d")!;
  const status = element<HTMLElement>("status");
  const gate = new MutationGate();

  const modelText = element<HTMLTextAreaElement>("model-input").value;
  const client = await SessionClient.create(SERVER, JSON.parse(modelText));
  let model = await client.getModel();
  fillAxisPickers(model);

  let grid: GridGeometry = { xMax: 1, yMax: 1, cellSize: 40, origin: { px: 40, py: 0 } };
  let draft: SketchDraft | null = null;
  let logScale = false;

  async function redraw(): Promise<void> {
    const axes = axesFromPickers(model);
    const space = await client.getTensionSpace(axes);
    grid = {
      xMax: space.x_max,
      yMax: space.y_max,
      cellSize: Math.min(
        (canvas.width - 80) / (space.x_max + 1),
        (canvas.height - 80) / (space.y_max + 1),
      ),
      origin: { px: 40, py: canvas.height - 40 },
    };
    ctx.clearRect(0, 0, canvas.width, canvas.height);
    drawHeatmap(ctx, heatmapCells(space, logScale), grid);
    for (const arrow of movementArrows(await client.getMovements(axes))) {
      drawArrow(ctx, arrow, grid);
    }
    const shape = await client.getShape(axes);
    status.textContent = `${shape.label} (r = ${shape.correlation.toFixed(2)})`;
    if (draft) drawSketchEdges(ctx, draft.edges, grid);

    // pink start dot: the actual world's position, via the movement list
    const start = (await client.getMovements(axes, "current"))[0];
    if (start) drawStartDot(ctx, { x: start.from[0], y: start.from[1] }, grid);
  }

  let strokeStart: { px: number; py: number } | null = null;
  canvas.addEventListener("pointerdown", (event) => {
    strokeStart = { px: event.offsetX, py: event.offsetY };
  });
  canvas.addEventListener("pointerup", (event) => {
    if (!strokeStart || !draft) return;
    draft.addStroke(strokeStart, { px: event.offsetX, py: event.offsetY });
    strokeStart = null;
    void redraw();
  });
  canvas.addEventListener("pointermove", (event) => {
    const node = snapToNode(event.offsetX, event.offsetY, grid);
    element<HTMLElement>("cursor").textContent = `(${node.x}, ${node.y})`;
  });

  element<HTMLButtonElement>("sketch-worldview").onclick = () => {
    draft = new SketchDraft("worldview", axesFromPickers(model), grid);
  };
  element<HTMLButtonElement>("sketch-action").onclick = () => {
    draft = new SketchDraft("action", axesFromPickers(model), grid);
  };
  element<HTMLButtonElement>("fit").onclick = () =>
    gate.run(async () => {
      if (!draft) return;
      const seed = Number(element<HTMLInputElement>("seed").value) || 0;
      const response =
        draft.mode === "worldview"
          ? await client.fitWorldviews(draft.toDocument(), seed)
          : await client.fitActions(draft.toDocument());
      draft.applyFailures(response.failures);
      model = response.model;
      status.textContent = response.failures.length
        ? `${response.failures.length} edge(s) failed to fit`
        : "fit ok";
      await redraw();
    });
  element<HTMLButtonElement>("step").onclick = () =>
    gate.run(async () => {
      await client.step();
      model = await client.getModel();
      await redraw();
    });
  element<HTMLButtonElement>("reset").onclick = () =>
    gate.run(async () => {
      model = await client.reset();
      draft = null;
      await redraw();
    });
  element<HTMLInputElement>("log-scale").onchange = (event) => {
    logScale = (event.target as HTMLInputElement).checked;
    void redraw();
  };
  element<HTMLSelectElement>("x-axis").onchange = () => void redraw();
  element<HTMLSelectElement>("y-axis").onchange = () => void redraw();

  await redraw();
}

boot().catch((error) => {
  document.getElementById("status")!.textContent = String(error);
});
