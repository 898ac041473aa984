/** Canvas drawing for the workbench: heatmap cells, overlay arrows, the
 * start-world dot and in-progress sketch edges. */

import type { Arrow, DraftEdge, GridGeometry, GridNode, HeatmapCell } from "./state.js";
import { nodeToPixel } from "./state.js";

export function drawHeatmap(
  ctx: CanvasRenderingContext2D,
  cells: HeatmapCell[],
  grid: GridGeometry,
): void {
  const half = grid.cellSize / 2;
  for (const cell of cells) {
    const { px, py } = nodeToPixel(cell, grid);
    const level = Math.round(cell.brightness * 255);
    ctx.fillStyle = `rgb(${level}, ${Math.round(level * 0.55)}, ${Math.round(level * 0.75)})`;
    ctx.fillRect(px - half, py - half, grid.cellSize, grid.cellSize);
  }
}

export function drawArrow(
  ctx: CanvasRenderingContext2D,
  arrow: Arrow,
  grid: GridGeometry,
): void {
  const from = nodeToPixel(arrow.from, grid);
  const to = nodeToPixel(arrow.to, grid);
  ctx.strokeStyle = arrow.color;
  ctx.fillStyle = arrow.color;
  ctx.lineWidth = 2;
  ctx.beginPath();
  ctx.moveTo(from.px, from.py);
  ctx.lineTo(to.px, to.py);
  ctx.stroke();

  const angle = Math.atan2(to.py - from.py, to.px - from.px);
  const head = 8;
  ctx.beginPath();
  ctx.moveTo(to.px, to.py);
  ctx.lineTo(to.px - head * Math.cos(angle - 0.4), to.py - head * Math.sin(angle - 0.4));
  ctx.lineTo(to.px - head * Math.cos(angle + 0.4), to.py - head * Math.sin(angle + 0.4));
  ctx.closePath();
  ctx.fill();

  ctx.font = "11px sans-serif";
  ctx.fillText(arrow.label, (from.px + to.px) / 2 + 4, (from.py + to.py) / 2 - 4);
}

export function drawStartDot(
  ctx: CanvasRenderingContext2D,
  node: GridNode,
  grid: GridGeometry,
): void {
  const { px, py } = nodeToPixel(node, grid);
  ctx.fillStyle = "#ff69b4";
  ctx.beginPath();
  ctx.arc(px, py, grid.cellSize / 5, 0, Math.PI * 2);
  ctx.fill();
}

export function drawSketchEdges(
  ctx: CanvasRenderingContext2D,
  edges: DraftEdge[],
  grid: GridGeometry,
): void {
  for (const edge of edges) {
    drawArrow(ctx, { ...edge, label: "" }, grid);
  }
}
