/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_get_rendered_inner_volume: (a: number) => number;
export const __wbg_get_rendered_n_inner: (a: number) => number;
export const __wbg_get_rendered_n_outer: (a: number) => number;
export const __wbg_get_rendered_n_undecided: (a: number) => number;
export const __wbg_get_rendered_summary: (a: number) => [number, number];
export const __wbg_get_rendered_svg: (a: number) => [number, number];
export const __wbg_rendered_free: (a: number, b: number) => void;
export const __wbg_set_rendered_inner_volume: (a: number, b: number) => void;
export const __wbg_set_rendered_n_inner: (a: number, b: number) => void;
export const __wbg_set_rendered_n_outer: (a: number, b: number) => void;
export const __wbg_set_rendered_n_undecided: (a: number, b: number) => void;
export const __wbg_set_rendered_summary: (a: number, b: number, c: number) => void;
export const __wbg_set_rendered_svg: (a: number, b: number, c: number) => void;
export const benchmark_names: () => [number, number];
export const benchmark_text: (a: number, b: number) => [number, number, number, number];
export const contract: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const solve_svg: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number) => [number, number, number];
export const __externref_table_alloc: () => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_drop_slice: (a: number, b: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;
