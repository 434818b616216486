/* tslint:disable */
/* eslint-disable */

/**
 * A 2D slice ready for drawing. `values` is row-major with `x1` as the
 * slow axis; contours are flat `[x0, y0, x1, y1, ...]` segment lists in
 * world coordinates.
 */
export class Field {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * `[x1_lo, x1_hi, x2_lo, x2_hi]`.
     */
    readonly bounds: Float64Array;
    /**
     * Zero level of `values`.
     */
    readonly contour: Float64Array;
    readonly n1: number;
    readonly n2: number;
    /**
     * Zero level of the obstacle function `l`; equal to `contour` for
     * obstacle fields.
     */
    readonly outline: Float64Array;
    readonly values: Float64Array;
}

/**
 * A solved Dubins tube over `(x1, x2, v, θ)`.
 */
export class Tube {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Heading in radians at index `i`.
     */
    heading(i: number): number;
    constructor(experiment: string, seed: number, resolution: number);
    slice(speed: number, heading: number): Field;
    /**
     * Speed in state units at index `i`.
     */
    speed(i: number): number;
    readonly converged: boolean;
    readonly headings: number;
    readonly iterations: number;
    readonly speeds: number;
}

/**
 * Converged avoid tube of a disc of `radius` at the origin under drift
 * `(vx, vy)` on `[-4, 4]²`.
 */
export function drift_tube(vx: number, vy: number, radius: number, resolution: number): Field;

/**
 * Obstacle function `l` of a generated instance, sliced at speed index
 * `speed` (only the velocity family depends on it).
 */
export function obstacle(experiment: string, seed: number, resolution: number, speed: number): Field;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_field_free: (a: number, b: number) => void;
    readonly __wbg_tube_free: (a: number, b: number) => void;
    readonly drift_tube: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly field_bounds: (a: number) => [number, number];
    readonly field_contour: (a: number) => [number, number];
    readonly field_n1: (a: number) => number;
    readonly field_n2: (a: number) => number;
    readonly field_outline: (a: number) => [number, number];
    readonly field_values: (a: number) => [number, number];
    readonly obstacle: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly tube_converged: (a: number) => number;
    readonly tube_heading: (a: number, b: number) => number;
    readonly tube_headings: (a: number) => number;
    readonly tube_iterations: (a: number) => number;
    readonly tube_new: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly tube_slice: (a: number, b: number, c: number) => [number, number, number];
    readonly tube_speed: (a: number, b: number) => number;
    readonly tube_speeds: (a: number) => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
