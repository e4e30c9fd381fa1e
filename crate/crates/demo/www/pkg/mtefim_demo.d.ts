/* tslint:disable */
/* eslint-disable */

/**
 * A generated network held between calls.
 */
export class Demo {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * EDV, TIS and a Monte Carlo spread estimate for a JSON array of node ids.
     */
    evaluate(seed_set: string, replicas: number, seed: number): string;
    /**
     * Nodes, edges, communities and a layout.
     */
    graph(): string;
    /**
     * Generates a GN network from a JSON request (all fields optional).
     */
    constructor(request: string);
    /**
     * Runs the two-proxy solver and returns its convergence trace.
     */
    solve(request: string): string;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly demo_evaluate: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly demo_graph: (a: number) => [number, number];
    readonly demo_new: (a: number, b: number) => [number, number, number];
    readonly demo_solve: (a: number, b: number, c: number) => [number, number, number, number];
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
