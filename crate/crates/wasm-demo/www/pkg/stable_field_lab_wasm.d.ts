/* tslint:disable */
/* eslint-disable */

/**
 * `b(T)^alpha` and `T^{-p} b(T)^alpha` along `t_values`.
 */
export function bt_curve(text: string, t_values: Float64Array, mesh: number, level: number): string;

/**
 * Dimension, torsion profile, free lift and conservativity.
 */
export function classify_model(text: string): string;

/**
 * JSON text of a bundled model, for prefilling the editor.
 */
export function preset(name: string): string;

/**
 * Partial maxima over `ladder`, their medians, the verdict report when the
 * ladder is long enough, and a Frechet QQ table at the largest scale.
 */
export function simulate_maxima(text: string, ladder: Float64Array, level: number, reps: number, seed: bigint, series: boolean): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly bt_curve: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly classify_model: (a: number, b: number) => [number, number, number, number];
    readonly preset: (a: number, b: number) => [number, number, number, number];
    readonly simulate_maxima: (a: number, b: number, c: number, d: number, e: number, f: number, g: bigint, h: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
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
