/* tslint:disable */
/* eslint-disable */

export class Demo {
    free(): void;
    [Symbol.dispose](): void;
    dims(): Uint32Array;
    /**
     * Distance to the nearest obstacle (m) for every voxel in layer `z`.
     */
    edf_slice(z: number): Float32Array;
    goal(): Uint32Array;
    max_distance(): number;
    /**
     * Generates a scenario of `size × size × max(size/2, 16)` voxels at 0.2 m.
     */
    constructor(kind: string, size: number, seed: number);
    /**
     * 1 for occupied voxels in layer `z`.
     */
    occupancy_slice(z: number): Uint8Array;
    /**
     * Plans from `start` to `goal` (voxel indices, `[i, j, k]`) and returns JSON.
     */
    plan(algorithm: string, c_w: number, start: Uint32Array, goal: Uint32Array): string;
    start(): Uint32Array;
}

/**
 * Score per line-of-sight value when keeping `k` of the 8 neighbours, as JSON.
 */
export function quality_study(k: number, c_w: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly demo_dims: (a: number) => [number, number];
    readonly demo_edf_slice: (a: number, b: number) => [number, number];
    readonly demo_goal: (a: number) => [number, number];
    readonly demo_max_distance: (a: number) => number;
    readonly demo_new: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly demo_occupancy_slice: (a: number, b: number) => [number, number];
    readonly demo_plan: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
    readonly demo_start: (a: number) => [number, number];
    readonly quality_study: (a: number, b: number) => [number, number, number, number];
    readonly __externref_table_alloc: () => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
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
