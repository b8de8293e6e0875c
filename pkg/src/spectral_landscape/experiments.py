"""Builders for the benchmark circuits: a two-qubit product ansatz, small UCC
ansatzes and MaxCut QAOA."""
from __future__ import annotations

import itertools
import math

import networkx as nx
import numpy as np

from .circuit import FixedGate, Gadget, ParamCircuit, ParamExpr
from .errors import ValidationError
from .pauli import Observable, PauliString, PauliSum


def simple_2q(pad: int = 0) -> tuple[ParamCircuit, PauliString]:
    """Ry(t0) x Ry(t1) on |00> measured in ZZ, optionally followed by ``pad``
    CNOT pairs that multiply to the identity."""
    gates = [
        Gadget(PauliString("YI"), ParamExpr(1.0, 0)),
        Gadget(PauliString("IY"), ParamExpr(1.0, 1)),
    ]
    for _ in range(pad):
        gates += [FixedGate.make("cx", (0, 1)), FixedGate.make("cx", (0, 1))]
    return ParamCircuit(2, 2, tuple(gates), "00"), PauliString("ZZ")


def ucc_2q() -> tuple[ParamCircuit, PauliString]:
    """Two gadgets exp(-i t0 XY/2) exp(-i t1 YX/2) on |00>, observable ZI."""
    gates = (
        Gadget(PauliString("XY"), ParamExpr(1.0, 0)),
        Gadget(PauliString("YX"), ParamExpr(1.0, 1)),
    )
    return ParamCircuit(2, 2, gates, "00"), PauliString("ZI")


UCC_DOUBLES = ("XXXY", "XXYX", "XYXX", "YXXX", "YYYX", "YYXY", "YXYY", "XYYY")


def ucc_h2_singles(seed=0, doubles_mean=math.pi / 4, doubles_std=0.1):
    """Four-qubit UCC ansatz for H2 in a minimal basis.

    Qubits are spin orbitals ordered (0a, 1a, 0b, 1b), so the Hartree-Fock
    reference is |1010>. Each singles parameter drives the gadget pair
    (XY, -YX) on one spin sector; the doubles excitation is eight four-qubit
    gadgets at fixed angles drawn from a normal distribution. Returns the
    circuit and a dict of observables (``"ZIZI"`` is the default target).
    """
    rng = np.random.default_rng(seed)
    gates: list = []
    for param, (a, b) in enumerate([(0, 1), (2, 3)]):
        for letters, sign in (("XY", 1.0), ("YX", -1.0)):
            p = PauliString.on(4, {a: letters[0], b: letters[1]})
            gates.append(Gadget(p, ParamExpr(sign, param)))
    for letters in UCC_DOUBLES:
        angle = float(rng.normal(doubles_mean, doubles_std))
        gates.append(Gadget(PauliString(letters), ParamExpr.const(angle)))
    obs = {"ZIZI": PauliString("ZIZI"), "XXYY": PauliString("XXYY")}
    return ParamCircuit(4, 2, tuple(gates), "1010"), obs


# ---------------------------------------------------------------------------
# QAOA

def validate_graph(graph: nx.Graph, regular: int | None = 3, triangle_free: bool = True) -> None:
    if graph.number_of_nodes() == 0:
        raise ValidationError("graph has no nodes")
    if sorted(graph.nodes) != list(range(graph.number_of_nodes())):
        raise ValidationError("graph nodes must be labelled 0..n-1")
    if any(u == v for u, v in graph.edges):
        raise ValidationError("graph has self loops")
    if regular is not None and any(deg != regular for _, deg in graph.degree):
        raise ValidationError(f"graph is not {regular}-regular")
    if triangle_free and any(nx.triangles(graph).values()):
        raise ValidationError("graph contains a triangle")


def random_regular_triangle_free_graph(n: int, degree: int = 3, seed=None, max_tries: int = 10_000) -> nx.Graph:
    """Rejection-sample a random regular graph without triangles."""
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        g = nx.random_regular_graph(degree, n, seed=int(rng.integers(2**31)))
        if not any(nx.triangles(g).values()):
            return g
    raise ValidationError(f"no triangle-free {degree}-regular graph on {n} nodes found")


def graph_from_edges(edges, n: int | None = None) -> nx.Graph:
    g = nx.Graph()
    edges = [tuple(int(v) for v in e) for e in edges]
    n = n if n is not None else 1 + max(itertools.chain.from_iterable(edges))
    g.add_nodes_from(range(n))
    g.add_edges_from(edges)
    return g


def maxcut_hamiltonian(graph: nx.Graph) -> PauliSum:
    n = graph.number_of_nodes()
    return PauliSum(tuple((1.0, PauliString.on(n, {u: "Z", v: "Z"})) for u, v in sorted(graph.edges)))


def qaoa_maxcut(graph: nx.Graph, p: int = 1, earlier_angles=(math.pi / 4, math.pi / 4),
                check: bool = True) -> tuple[ParamCircuit, Observable]:
    """MaxCut QAOA on |+>^n with ZZ edge gadgets (gamma) and X gadgets (beta).

    Only the last layer is parameterised, as (gamma, beta); earlier layers are
    fixed at ``earlier_angles``. Every gadget has unit multiplier, i.e. the
    layer is exp(-i beta sum X / 2) exp(-i gamma sum ZZ / 2).
    """
    if check:
        validate_graph(graph)
    if p < 1:
        raise ValidationError("QAOA depth must be at least 1")
    n = graph.number_of_nodes()
    edges = sorted(tuple(sorted(e)) for e in graph.edges)
    gates: list = []
    for layer in range(p):
        last = layer == p - 1
        g_expr = ParamExpr(1.0, 0) if last else ParamExpr.const(earlier_angles[0])
        b_expr = ParamExpr(1.0, 1) if last else ParamExpr.const(earlier_angles[1])
        for u, v in edges:
            gates.append(Gadget(PauliString.on(n, {u: "Z", v: "Z"}), g_expr))
        for q in range(n):
            gates.append(Gadget(PauliString.on(n, {q: "X"}), b_expr))
    return ParamCircuit(n, 2, tuple(gates), "+" * n), maxcut_hamiltonian(graph)


def build_experiment(name: str, **cfg):
    """Dispatch by name. Returns (circuit, observable)."""
    if name == "simple_2q":
        return simple_2q(int(cfg.get("pad", 0)))
    if name == "ucc_2q":
        return ucc_2q()
    if name == "ucc_h2_singles":
        c, obs = ucc_h2_singles(cfg.get("seed", 0))
        return c, obs[cfg.get("observable", "ZIZI")]
    if name == "qaoa_maxcut":
        if "edges" in cfg:
            graph = graph_from_edges(cfg["edges"], cfg.get("n_nodes"))
        else:
            graph = random_regular_triangle_free_graph(int(cfg.get("n_nodes", 8)), 3, cfg.get("graph_seed", 0))
        return qaoa_maxcut(graph, int(cfg.get("p", 1)))
    raise ValidationError(f"unknown experiment {name!r}")
