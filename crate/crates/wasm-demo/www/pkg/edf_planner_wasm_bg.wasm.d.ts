/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_demo_free: (a: number, b: number) => void;
export const demo_dims: (a: number) => [number, number];
export const demo_edf_slice: (a: number, b: number) => [number, number];
export const demo_goal: (a: number) => [number, number];
export const demo_max_distance: (a: number) => number;
export const demo_new: (a: number, b: number, c: number, d: number) => [number, number, number];
export const demo_occupancy_slice: (a: number, b: number) => [number, number];
export const demo_plan: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
export const demo_start: (a: number) => [number, number];
export const quality_study: (a: number, b: number) => [number, number, number, number];
export const __externref_table_alloc: () => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;
