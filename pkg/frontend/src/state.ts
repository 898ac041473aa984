/**
 * Client-side canvas state: grid snapping, brightness normalization,
 * sketch drafting with failure highlighting, and the one-mutation-at-a-time
 * guard. Pure data transforms — no canvas or network access — so the whole
 * module is unit-testable headlessly.
 */

import type {
  Axes,
  FitFailure,
  MovementEntry,
  SketchDocument,
  StepRecord,
  TensionSpaceDocument,
} from "./api.js";

export interface GridNode {
  x: number;
  y: number;
}

export interface GridGeometry {
  xMax: number;
  yMax: number;
  /** Pixel size of one grid cell. */
  cellSize: number;
  /** Pixel position of grid node (0, 0); y grows upward from it. */
  origin: { px: number; py: number };
}

/** Snap a freehand pixel position to the nearest grid node, clamped. */
export function snapToNode(
  px: number,
  py: number,
  grid: GridGeometry,
): GridNode {
  const clamp = (v: number, max: number) => Math.min(Math.max(v, 0), max);
  return {
    x: clamp(Math.round((px - grid.origin.px) / grid.cellSize), grid.xMax),
    y: clamp(Math.round((grid.origin.py - py) / grid.cellSize), grid.yMax),
  };
}

/** Pixel center of a grid node (inverse of snapping). */
export function nodeToPixel(node: GridNode, grid: GridGeometry): { px: number; py: number } {
  return {
    px: grid.origin.px + node.x * grid.cellSize,
    py: grid.origin.py - node.y * grid.cellSize,
  };
}

/**
 * Normalized cell brightness in [0, 1]: linear in the count by default,
 * or log-compressed (log1p-normalized) when the toggle is on. Zero-count
 * cells are always fully dark.
 */
export function brightness(count: number, maxCount: number, logScale = false): number {
  if (count <= 0 || maxCount <= 0) return 0;
  if (!logScale) return count / maxCount;
  return Math.log1p(count) / Math.log1p(maxCount);
}

export interface HeatmapCell extends GridNode {
  count: number;
  brightness: number;
}

/** Flatten a tension-space document into renderable cells. */
export function heatmapCells(
  space: TensionSpaceDocument,
  logScale = false,
): HeatmapCell[] {
  const max = Math.max(...space.counts.map((row) => Math.max(...row)));
  const cells: HeatmapCell[] = [];
  space.counts.forEach((row, x) => {
    row.forEach((count, y) => {
      cells.push({ x, y, count, brightness: brightness(count, max, logScale) });
    });
  });
  return cells;
}

export function totalMass(space: TensionSpaceDocument): number {
  return space.counts.reduce(
    (sum, row) => sum + row.reduce((s, c) => s + c, 0),
    0,
  );
}

export interface Arrow {
  from: GridNode;
  to: GridNode;
  label: string;
  color: string;
}

export function movementArrows(entries: MovementEntry[]): Arrow[] {
  return entries.map((entry) => ({
    from: { x: entry.from[0], y: entry.from[1] },
    to: { x: entry.to[0], y: entry.to[1] },
    label: `${entry.action} (${entry.class})`,
    color: "cyan",
  }));
}

/** Trace-path arrows: one per successful step that moved in this space. */
export function traceArrows(
  steps: StepRecord[],
  positionOf: (world: (number | null)[]) => GridNode,
): Arrow[] {
  const arrows: Arrow[] = [];
  for (const step of steps) {
    if (!step.succeeded || step.action === null) continue;
    const from = positionOf(step.before);
    const to = positionOf(step.after);
    arrows.push({ from, to, label: step.action, color: "magenta" });
  }
  return arrows;
}

export interface DraftEdge {
  from: GridNode;
  to: GridNode;
  color: string;
}

const FAILURE_COLOR = "red";

/**
 * An in-progress sketch: strokes snap to grid nodes, zero-displacement
 * strokes are dropped, and fit failures repaint the offending edges red.
 */
export class SketchDraft {
  readonly edges: DraftEdge[] = [];

  constructor(
    readonly mode: "worldview" | "action",
    readonly axes: Axes,
    private readonly grid: GridGeometry,
  ) {}

  /** Add a freehand stroke given in pixels; returns the snapped edge or null. */
  addStroke(
    startPx: { px: number; py: number },
    endPx: { px: number; py: number },
    color = "black",
  ): DraftEdge | null {
    const from = snapToNode(startPx.px, startPx.py, this.grid);
    const to = snapToNode(endPx.px, endPx.py, this.grid);
    if (from.x === to.x && from.y === to.y) return null;
    const edge = { from, to, color };
    this.edges.push(edge);
    return edge;
  }

  removeLastEdge(): void {
    this.edges.pop();
  }

  clear(): void {
    this.edges.length = 0;
  }

  /** Repaint edges named by fit failures red; returns the failed indices. */
  applyFailures(failures: FitFailure[]): number[] {
    const failed = [...new Set(failures.map((f) => f.edge))];
    for (const index of failed) {
      const edge = this.edges[index];
      if (edge) edge.color = FAILURE_COLOR;
    }
    return failed;
  }

  toDocument(): SketchDocument {
    return {
      version: 1,
      mode: this.mode,
      axes: this.axes,
      edges: this.edges.map((edge) => ({
        from: [edge.from.x, edge.from.y],
        to: [edge.to.x, edge.to.y],
        color: edge.color,
      })),
    };
  }
}

/**
 * Client-side serialization of mutations: at most one in flight per
 * session, mirroring the server's 409 contract so the UI never trips it.
 */
export class MutationGate {
  private busy = false;

  get inFlight(): boolean {
    return this.busy;
  }

  async run<T>(mutation: () => Promise<T>): Promise<T> {
    if (this.busy) {
      throw new Error("a mutation is already in flight for this session");
    }
    this.busy = true;
    try {
      return await mutation();
    } finally {
      this.busy = false;
    }
  }
}
