/* tslint:disable */
/* eslint-disable */

/**
 * Outcome of [`solve_svg`].
 */
export class Rendered {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    inner_volume: number;
    n_inner: number;
    n_outer: number;
    n_undecided: number;
    summary: string;
    svg: string;
}

export function benchmark_names(): string[];

export function benchmark_text(name: string): string;

export function contract(text: string, contractor: string): string;

export function solve_svg(text: string, algo: string, eps: number, omega: number, x: string, y: string): Rendered;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_get_rendered_inner_volume: (a: number) => number;
    readonly __wbg_get_rendered_n_inner: (a: number) => number;
    readonly __wbg_get_rendered_n_outer: (a: number) => number;
    readonly __wbg_get_rendered_n_undecided: (a: number) => number;
    readonly __wbg_get_rendered_summary: (a: number) => [number, number];
    readonly __wbg_get_rendered_svg: (a: number) => [number, number];
    readonly __wbg_rendered_free: (a: number, b: number) => void;
    readonly __wbg_set_rendered_inner_volume: (a: number, b: number) => void;
    readonly __wbg_set_rendered_n_inner: (a: number, b: number) => void;
    readonly __wbg_set_rendered_n_outer: (a: number, b: number) => void;
    readonly __wbg_set_rendered_n_undecided: (a: number, b: number) => void;
    readonly __wbg_set_rendered_summary: (a: number, b: number, c: number) => void;
    readonly __wbg_set_rendered_svg: (a: number, b: number, c: number) => void;
    readonly benchmark_names: () => [number, number];
    readonly benchmark_text: (a: number, b: number) => [number, number, number, number];
    readonly contract: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly solve_svg: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number) => [number, number, number];
    readonly __externref_table_alloc: () => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_drop_slice: (a: number, b: number) => void;
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
