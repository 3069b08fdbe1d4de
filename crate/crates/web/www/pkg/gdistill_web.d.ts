/* tslint:disable */
/* eslint-disable */

/**
 * Draws a random state and runs the full pipeline on it.
 */
export function random_pipeline(modes_a: number, modes_b: number, seed: number, kind: string): string;

/**
 * Symmetrizes a two-mode squeezed vacuum whose sides went through losses
 * `eta_a` and `eta_b`.
 */
export function symmetrize_lossy(r: number, eta_a: number, eta_b: number): string;

/**
 * Two-mode squeezed vacuum with squeezing `r`, B's mode sent through a
 * channel of transmissivity `eta`, and the reduction-criterion value
 * against probes of squeezing `0..=probe_max`.
 */
export function tmss_explorer(r: number, eta: number, probe_max: number, points: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly random_pipeline: (a: number, b: number, c: number, d: number, e: number) => [number, number];
    readonly symmetrize_lossy: (a: number, b: number, c: number) => [number, number];
    readonly tmss_explorer: (a: number, b: number, c: number, d: number) => [number, number];
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
