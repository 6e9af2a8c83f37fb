/* tslint:disable */
/* eslint-disable */

/**
 * CDF of the outside interference at each of `xs`.
 */
export function interference_cdf(phi_db: number, alpha: number, xs: Float64Array): Float64Array;

/**
 * `log10` of the average number of scheduling choices for `1..=max_channels` channels.
 */
export function log10_search_space(mean_load: number, max_channels: number): Float64Array;

/**
 * Expected served devices against `a1` (with `a1 + a2 = 1`) on `points`
 * evenly spaced splits, for random scheduling (hybrid) followed by the
 * one-device-per-channel baseline as the last entry.
 */
export function served_vs_a1(mean_load: number, channels: number, mu: number, phi1_db: number, tau: number, points: number): Float64Array;

/**
 * `[p11, p12, p22]` at the given split.
 */
export function success_probs(mu: number, phi1_db: number, a1: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly interference_cdf: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly log10_search_space: (a: number, b: number) => [number, number, number, number];
    readonly served_vs_a1: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly success_probs: (a: number, b: number, c: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
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
