/* tslint:disable */
/* eslint-disable */

/**
 * Outcome of one detection.
 */
export class Detection {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    bit_errors: number;
    detected: string;
    kappa_down: number;
    /**
     * DM-CSS only: peak magnitude of each dechirped branch
     */
    kappa_up: number;
    sent: string;
}

/**
 * Received samples plus both dechirped spectra.
 */
export class View {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * `|DFT(r * c_u)|`, where down-chirp symbols peak
     */
    readonly down: Float64Array;
    readonly im: Float64Array;
    readonly re: Float64Array;
    /**
     * `|DFT(r * c_d)|`, where up-chirp symbols peak
     */
    readonly up: Float64Array;
}

/**
 * BER at each grid point.
 */
export function berCurve(scheme: string, lambda: number, grid: Float64Array, trials: number, psi: number, delta_f: number, rho: number, seed: number): Float64Array;

export function bitsPerSymbol(scheme: string, lambda: number): number;

export function detect(scheme: string, lambda: number, value: number, ebn0_db: number, psi: number, delta_f: number, rho: number, seed: number): Detection;

/**
 * One symbol through the channel; a non-finite `ebn0_db` means no noise.
 */
export function view(scheme: string, lambda: number, value: number, ebn0_db: number, psi: number, delta_f: number, rho: number, seed: number): View;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_detection_free: (a: number, b: number) => void;
    readonly __wbg_get_detection_bit_errors: (a: number) => number;
    readonly __wbg_get_detection_detected: (a: number) => [number, number];
    readonly __wbg_get_detection_kappa_down: (a: number) => number;
    readonly __wbg_get_detection_kappa_up: (a: number) => number;
    readonly __wbg_get_detection_sent: (a: number) => [number, number];
    readonly __wbg_set_detection_bit_errors: (a: number, b: number) => void;
    readonly __wbg_set_detection_detected: (a: number, b: number, c: number) => void;
    readonly __wbg_set_detection_kappa_down: (a: number, b: number) => void;
    readonly __wbg_set_detection_kappa_up: (a: number, b: number) => void;
    readonly __wbg_set_detection_sent: (a: number, b: number, c: number) => void;
    readonly __wbg_view_free: (a: number, b: number) => void;
    readonly berCurve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number, j: number) => [number, number, number, number];
    readonly bitsPerSymbol: (a: number, b: number, c: number) => [number, number, number];
    readonly detect: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number];
    readonly view: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number, i: number) => [number, number, number];
    readonly view_down: (a: number) => [number, number];
    readonly view_im: (a: number) => [number, number];
    readonly view_re: (a: number) => [number, number];
    readonly view_up: (a: number) => [number, number];
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
