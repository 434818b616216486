/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_field_free: (a: number, b: number) => void;
export const __wbg_tube_free: (a: number, b: number) => void;
export const drift_tube: (a: number, b: number, c: number, d: number) => [number, number, number];
export const field_bounds: (a: number) => [number, number];
export const field_contour: (a: number) => [number, number];
export const field_n1: (a: number) => number;
export const field_n2: (a: number) => number;
export const field_outline: (a: number) => [number, number];
export const field_values: (a: number) => [number, number];
export const obstacle: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const tube_converged: (a: number) => number;
export const tube_heading: (a: number, b: number) => number;
export const tube_headings: (a: number) => number;
export const tube_iterations: (a: number) => number;
export const tube_new: (a: number, b: number, c: number, d: number) => [number, number, number];
export const tube_slice: (a: number, b: number, c: number) => [number, number, number];
export const tube_speed: (a: number, b: number) => number;
export const tube_speeds: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
