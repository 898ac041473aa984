/**
 * Typed client for the authoring HTTP API. Every number the UI displays
 * comes through here — the client performs no model math of its own.
 */

import { z } from "zod";

const world = z.array(z.number().int().nullable());

export const modelDocument = z.object({
  version: z.literal(1),
  range: z.object({ min: z.number().int(), max: z.number().int() }),
  propositions: z.array(z.string()),
  themes: z.array(z.string()),
  actual_world: world,
  characters: z.array(
    z.object({
      name: z.string(),
      perceived: world,
      worldviews: z.record(world),
      actions: z.array(z.string()),
    }),
  ),
  actions: z.array(z.object({ name: z.string(), pre: world, post: world })),
});

export const tensionSpaceDocument = z.object({
  version: z.literal(1),
  axes: z
    .object({
      x: z.object({ character: z.string(), theme: z.string() }),
      y: z.object({ character: z.string(), theme: z.string() }),
    })
    .nullable(),
  x_max: z.number().int().nonnegative(),
  y_max: z.number().int().nonnegative(),
  counts: z.array(z.array(z.number().int().nonnegative())),
});

export const stepRecord = z.object({
  character: z.string(),
  action: z.string().nullable(),
  succeeded: z.boolean(),
  before: world,
  after: world,
  score: z.number().int().nullable(),
});

export const movementEntry = z.object({
  action: z.string(),
  from: z.tuple([z.number().int(), z.number().int()]),
  to: z.tuple([z.number().int(), z.number().int()]),
  class: z.number().int().min(1).max(9),
});

export const shapeResult = z.object({
  label: z.enum(["Strong", "Weak", "Neutral"]),
  correlation: z.number(),
});

export const fitFailure = z.object({
  edge: z.number().int(),
  movement: z.number().int().nullable(),
  reason: z.string(),
});

export const worldviewFitResponse = z.object({
  failures: z.array(fitFailure),
  fitted_x: world,
  fitted_y: world,
  model: modelDocument,
});

export const actionFitResponse = z.object({
  failures: z.array(fitFailure),
  actions: z.array(z.string()),
  start_world: world,
  model: modelDocument,
});

export const traceDocument = z.object({
  version: z.literal(1),
  config: z.object({
    max_steps: z.number().int(),
    strict_improvement: z.boolean(),
    seed: z.number().int(),
  }),
  steps: z.array(stepRecord),
});

export type ModelDocument = z.infer<typeof modelDocument>;
export type TensionSpaceDocument = z.infer<typeof tensionSpaceDocument>;
export type StepRecord = z.infer<typeof stepRecord>;
export type MovementEntry = z.infer<typeof movementEntry>;
export type ShapeResult = z.infer<typeof shapeResult>;
export type FitFailure = z.infer<typeof fitFailure>;
export type WorldviewFitResponse = z.infer<typeof worldviewFitResponse>;
export type ActionFitResponse = z.infer<typeof actionFitResponse>;
export type TraceDocument = z.infer<typeof traceDocument>;

export interface Axes {
  x: { character: string; theme: string };
  y: { character: string; theme: string };
}

export interface SketchDocument {
  version: 1;
  mode: "worldview" | "action";
  axes: Axes;
  edges: { from: [number, number]; to: [number, number]; color?: string }[];
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: unknown,
  ) {
    super(`API error ${status}: ${JSON.stringify(detail)}`);
  }
}

async function request<T>(
  url: string,
  schema: z.ZodType<T>,
  init?: RequestInit,
): Promise<T> {
  const response = await fetch(url, {
    headers: { "Content-Type": "application/json" },
    ...init,
  });
  const body = await response.json();
  if (!response.ok) {
    throw new ApiError(response.status, body.detail ?? body);
  }
  return schema.parse(body);
}

function axisParams(axes: Axes): URLSearchParams {
  return new URLSearchParams({
    x_char: axes.x.character,
    x_theme: axes.x.theme,
    y_char: axes.y.character,
    y_theme: axes.y.theme,
  });
}

export class SessionClient {
  constructor(
    private readonly baseUrl: string,
    public readonly sessionId: string,
  ) {}

  static async create(
    baseUrl: string,
    model: unknown,
    seed = 0,
  ): Promise<SessionClient> {
    const created = await request(
      `${baseUrl}/api/session`,
      z.object({ session_id: z.string() }),
      { method: "POST", body: JSON.stringify({ model, seed }) },
    );
    return new SessionClient(baseUrl, created.session_id);
  }

  private url(path: string, params?: URLSearchParams): string {
    const suffix = params ? `?${params}` : "";
    return `${this.baseUrl}/api/session/${this.sessionId}${path}${suffix}`;
  }

  getModel(): Promise<ModelDocument> {
    return request(this.url("/model"), modelDocument);
  }

  putModel(model: ModelDocument): Promise<ModelDocument> {
    return request(this.url("/model"), modelDocument, {
      method: "PUT",
      body: JSON.stringify(model),
    });
  }

  getTensionSpace(
    axes: Axes,
    method: "conv" | "brute" = "conv",
  ): Promise<TensionSpaceDocument> {
    const params = axisParams(axes);
    params.set("method", method);
    return request(this.url("/tension-space", params), tensionSpaceDocument);
  }

  getMovements(
    axes: Axes,
    world: "start" | "current" = "current",
  ): Promise<MovementEntry[]> {
    const params = axisParams(axes);
    params.set("world", world);
    return request(this.url("/movements", params), z.array(movementEntry));
  }

  getShape(axes: Axes): Promise<ShapeResult> {
    return request(this.url("/shape", axisParams(axes)), shapeResult);
  }

  step(): Promise<StepRecord[]> {
    return request(this.url("/step"), z.array(stepRecord), { method: "POST" });
  }

  reset(): Promise<ModelDocument> {
    return request(this.url("/reset"), modelDocument, { method: "POST" });
  }

  getTrace(): Promise<TraceDocument> {
    return request(this.url("/trace"), traceDocument);
  }

  fitWorldviews(
    sketch: SketchDocument,
    seed: number,
  ): Promise<WorldviewFitResponse> {
    return request(this.url("/fit/worldviews"), worldviewFitResponse, {
      method: "POST",
      body: JSON.stringify({ sketch, seed }),
    });
  }

  fitActions(sketch: SketchDocument): Promise<ActionFitResponse> {
    return request(this.url("/fit/actions"), actionFitResponse, {
      method: "POST",
      body: JSON.stringify({ sketch }),
    });
  }
}
