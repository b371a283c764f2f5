/* tslint:disable */
/* eslint-disable */

/**
 * Runs the cutting-plane loop and returns its trace with drawable cuts.
 */
export function benders_trace(text: string, strategy: string, omega: string, omega0: string): string;

/**
 * Samples `(x, z(x))` on `[x_min, x_max]` where `z` is finite.
 */
export function epigraph_outline(text: string, x_min: string, x_max: string): string;

export function example_instance(): string;

/**
 * Separates `(x, eta)`; `strategy` is `mis` or `directional`.
 */
export function separate_point(text: string, x: string, eta: string, strategy: string, omega: string, omega0: string): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly benders_trace: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number];
    readonly epigraph_outline: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
    readonly example_instance: () => [number, number];
    readonly separate_point: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number, k: number, l: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
