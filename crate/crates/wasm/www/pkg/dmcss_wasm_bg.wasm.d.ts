/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_detection_free: (a: number, b: number) => void;
export const __wbg_get_detection_bit_errors: (a: number) => number;
export const __wbg_get_detection_detected: (a: number) => [number, number];
export const __wbg_get_detection_kappa_down: (a: number) => number;
export const __wbg_get_detection_kappa_up: (a: number) => number;
export const __wbg_get_detection_sent: (a: number) => [number, number];
export const __wbg_set_detection_bit_errors: (a: number, b: number) => void;
export const __wbg_set_detection_detected: (a: number, b: number, c: number) => void;
export const __wbg_set_detection_kappa_down: (a: number, b: number) => void;
export const __wbg_set_detection_kappa_up: (a: number, b: number) => void;
export const __wbg_set_detection_sent: (a: number, b: number, c: number) => void;
export const __wbg_view_free: (a: number, b: number) => void;
export const berCurve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number) => [number, number, number, number];
export const bitsPerSymbol: (a: number, b: number, c: number) => [number, number, number];
export const detect: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number];
export const view: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number];
export const view_down: (a: number) => [number, number];
export const view_im: (a: number) => [number, number];
export const view_re: (a: number) => [number, number];
export const view_up: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
