"""Computational domains, structured meshes, loading descriptions, and mesh file I/O.

Two domain kinds are supported:

* ``rectangle`` -- meshed with structured quadrilaterals carrying biquadratic
  (9-node) elements;
* ``annulus`` -- never meshed in 2D: all annulus work uses an azimuthal
  decomposition, i.e. radial 1D grids of quadratic (3-node) elements with fields
  tagged by an azimuthal wavenumber ``m`` and a trig parity.

Mesh files use the line-oriented, versioned ``SBMESH 1`` text format (see
``save_mesh`` / ``load_mesh``).
"""
from __future__ import annotations

import hashlib
import io
import os
import tempfile
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

_COORD_FMT = "%.17g"
# Tolerance under which a declared feature line is considered to coincide with an
# existing grid line (it is then placed exactly at the declared value).
_MERGE_TOL = 1e-9


class MeshError(ValueError):
    """Raised for invalid mesh construction or malformed mesh files."""


@dataclass(frozen=True)
class Domain:
    """A supported computational domain.

    kind ``rectangle``: ``[0, Lx] x [0, Ly]``.
    kind ``annulus``: ``r_a <= r <= r_b`` centered at the origin.
    """

    kind: str
    Lx: float | None = None
    Ly: float | None = None
    r_a: float | None = None
    r_b: float | None = None

    def __post_init__(self):
        if self.kind == "rectangle":
            if self.Lx is None or self.Ly is None or self.Lx <= 0 or self.Ly <= 0:
                raise MeshError("rectangle domain requires positive Lx, Ly")
        elif self.kind == "annulus":
            if self.r_a is None or self.r_b is None or not (0 < self.r_a < self.r_b):
                raise MeshError("annulus domain requires 0 < r_a < r_b")
        else:
            raise MeshError(f"unknown domain kind {self.kind!r}")

    @staticmethod
    def rectangle(Lx: float, Ly: float) -> "Domain":
        return Domain("rectangle", Lx=float(Lx), Ly=float(Ly))

    @staticmethod
    def annulus(r_a: float, r_b: float) -> "Domain":
        return Domain("annulus", r_a=float(r_a), r_b=float(r_b))


class RectangleMesh:
    """Structured quadrilateral mesh with 9-node biquadratic elements.

    Nodes live on the tensor grid refined with element midpoints; node id is
    ``jy * nnx + ix`` (x fastest). Boundary sides are tagged ``left``, ``right``,
    ``bottom``, ``top``. Feature lines are element breakpoints guaranteed to lie
    on node coordinates exactly.
    """

    def __init__(self, domain: Domain, xs: np.ndarray, ys: np.ndarray,
                 feature_x: Sequence[float] = (), feature_y: Sequence[float] = ()):
        if domain.kind != "rectangle":
            raise MeshError("RectangleMesh requires a rectangle domain")
        self.domain = domain
        self.xs = np.asarray(xs, dtype=float)
        self.ys = np.asarray(ys, dtype=float)
        for br, L, nm in ((self.xs, domain.Lx, "x"), (self.ys, domain.Ly, "y")):
            if br[0] != 0.0 or abs(br[-1] - L) > 1e-12 or np.any(np.diff(br) <= 0):
                raise MeshError(f"invalid {nm} breakpoints")
        self.feature_x = tuple(sorted(float(v) for v in feature_x))
        self.feature_y = tuple(sorted(float(v) for v in feature_y))
        for v in self.feature_x:
            if not np.any(np.abs(self.xs - v) < _MERGE_TOL):
                raise MeshError(f"feature line x={v} does not lie on a grid line")
        for v in self.feature_y:
            if not np.any(np.abs(self.ys - v) < _MERGE_TOL):
                raise MeshError(f"feature line y={v} does not lie on a grid line")
        # quadratic node coordinates (breakpoints plus midpoints)
        self.node_x = _with_midpoints(self.xs)
        self.node_y = _with_midpoints(self.ys)
        self.nelx = len(self.xs) - 1
        self.nely = len(self.ys) - 1
        self.nnx = 2 * self.nelx + 1
        self.nny = 2 * self.nely + 1
        self._cache: dict = {}

    kind = "rectangle"

    @property
    def n_nodes(self) -> int:
        return self.nnx * self.nny

    @property
    def n_elements(self) -> int:
        return self.nelx * self.nely

    @property
    def node_coords(self) -> np.ndarray:
        """(n_nodes, 2) array of node coordinates, x fastest."""
        X, Y = np.meshgrid(self.node_x, self.node_y)
        return np.column_stack([X.ravel(), Y.ravel()])

    def element_nodes(self, ex: int, ey: int) -> np.ndarray:
        """The 9 node ids of element (ex, ey), local ordering y-major."""
        return np.array([(2 * ey + jy) * self.nnx + 2 * ex + ix
                         for jy in range(3) for ix in range(3)])

    def connectivity(self) -> np.ndarray:
        """(n_elements, 9) connectivity, elements ordered ey-major."""
        key = "connectivity"
        if key not in self._cache:
            conn = np.array([self.element_nodes(ex, ey)
                             for ey in range(self.nely) for ex in range(self.nelx)])
            self._cache[key] = conn
        return self._cache[key]

    def boundary_edges(self):
        """List of (corner_node_1, corner_node_2, tag) for every boundary element edge."""
        nnx, nny = self.nnx, self.nny
        edges = []
        for ex in range(self.nelx):
            edges.append((2 * ex, 2 * ex + 2, "bottom"))
            base = (nny - 1) * nnx
            edges.append((base + 2 * ex, base + 2 * ex + 2, "top"))
        for ey in range(self.nely):
            edges.append((2 * ey * nnx, (2 * ey + 2) * nnx, "left"))
            edges.append((2 * ey * nnx + nnx - 1, (2 * ey + 2) * nnx + nnx - 1, "right"))
        return edges

    def boundary_node_masks(self):
        """Masks (on_x_edges, on_y_edges) over node ids."""
        ix = np.arange(self.n_nodes) % self.nnx
        jy = np.arange(self.n_nodes) // self.nnx
        on_x = (ix == 0) | (ix == self.nnx - 1)
        on_y = (jy == 0) | (jy == self.nny - 1)
        return on_x, on_y

    def mesh_hash(self) -> str:
        h = hashlib.sha256()
        h.update(b"rectangle")
        h.update(np.ascontiguousarray(self.xs).tobytes())
        h.update(np.ascontiguousarray(self.ys).tobytes())
        return h.hexdigest()[:16]

    def __eq__(self, other):
        return (isinstance(other, RectangleMesh)
                and np.array_equal(self.xs, other.xs)
                and np.array_equal(self.ys, other.ys))

    def __hash__(self):
        return hash(self.mesh_hash())

    def refined(self, factor: int = 2) -> "RectangleMesh":
        """Nested refinement splitting every element ``factor`` times per direction."""
        xs = _split_breaks(self.xs, factor)
        ys = _split_breaks(self.ys, factor)
        return RectangleMesh(self.domain, xs, ys, self.feature_x, self.feature_y)


class RadialMesh:
    """1D radial grid on [r_a, r_b] with quadratic (3-node) elements."""

    def __init__(self, domain: Domain, nel: int):
        if domain.kind != "annulus":
            raise MeshError("RadialMesh requires an annulus domain")
        if nel < 4:
            raise MeshError("radial grid requires nel >= 4")
        self.domain = domain
        self.nel = int(nel)
        self.nodes = np.linspace(domain.r_a, domain.r_b, 2 * self.nel + 1)
        self._cache: dict = {}

    kind = "radial"

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def node_coords(self) -> np.ndarray:
        return self.nodes

    def element_nodes(self, e: int) -> np.ndarray:
        return np.array([2 * e, 2 * e + 1, 2 * e + 2])

    def connectivity(self) -> np.ndarray:
        return np.array([self.element_nodes(e) for e in range(self.nel)])

    def boundary_edges(self):
        n = self.n_nodes
        return [(0, 0, "inner"), (n - 1, n - 1, "outer")]

    def mesh_hash(self) -> str:
        h = hashlib.sha256()
        h.update(b"radial")
        h.update(np.ascontiguousarray(self.nodes).tobytes())
        return h.hexdigest()[:16]

    def __eq__(self, other):
        return isinstance(other, RadialMesh) and np.array_equal(self.nodes, other.nodes)

    def __hash__(self):
        return hash(self.mesh_hash())


def _with_midpoints(breaks: np.ndarray) -> np.ndarray:
    out = np.empty(2 * len(breaks) - 1)
    out[0::2] = breaks
    out[1::2] = 0.5 * (breaks[:-1] + breaks[1:])
    return out


def _split_breaks(breaks: np.ndarray, factor: int) -> np.ndarray:
    segs = [np.linspace(a, b, factor + 1)[:-1] for a, b in zip(breaks[:-1], breaks[1:])]
    return np.concatenate(segs + [breaks[-1:]])


def build_rectangle_mesh(domain: Domain, nx: int, ny: int,
                         feature_lines: Mapping[str, Sequence[float]] | None = None
                         ) -> RectangleMesh:
    """Structured rectangle mesh with nodes placed on every declared feature line.

    ``feature_lines`` maps ``"x"`` / ``"y"`` to constants inside the domain. The
    base uniform nx (ny) subdivision is augmented so that every feature line is an
    element breakpoint; a feature line that would create a degenerate sliver
    (narrower than 5% of the uniform spacing without coinciding with a grid line)
    is rejected rather than snapped.
    """
    if domain.kind != "rectangle":
        raise MeshError("build_rectangle_mesh requires a rectangle domain")
    if nx < 4 or ny < 4:
        raise MeshError("nx and ny must be >= 4")
    feature_lines = feature_lines or {}
    fx = sorted(float(v) for v in feature_lines.get("x", ()))
    fy = sorted(float(v) for v in feature_lines.get("y", ()))
    xs = _insert_lines(np.linspace(0.0, domain.Lx, nx + 1), fx, "x")
    ys = _insert_lines(np.linspace(0.0, domain.Ly, ny + 1), fy, "y")
    return RectangleMesh(domain, xs, ys, fx, fy)


def _insert_lines(base: np.ndarray, lines: Sequence[float], axis: str) -> np.ndarray:
    h = base[1] - base[0]
    out = list(base)
    for v in lines:
        if not (base[0] < v < base[-1]):
            raise MeshError(f"feature line {axis}={v} outside the domain")
        near = [i for i, b in enumerate(out) if abs(b - v) < _MERGE_TOL]
        if near:
            out[near[0]] = v  # line coincides with a grid line; place it exactly
            continue
        gap = min(abs(b - v) for b in out)
        if gap < 0.05 * h:
            raise MeshError(
                f"feature line {axis}={v} not representable at this resolution "
                f"(would create a sliver of width {gap:.3g})")
        out.append(v)
        out.sort()
    return np.asarray(out)


def build_radial_grid(domain: Domain, nr: int) -> RadialMesh:
    """Uniform radial grid on [r_a, r_b] with nr quadratic elements."""
    return RadialMesh(domain, nr)


# ---------------------------------------------------------------------------
# Loading description
# ---------------------------------------------------------------------------

class LoadingError(ValueError):
    pass


class LoadingSpec:
    """Boundary tractions plus optional body force for one problem.

    Rectangle form: ``tractions`` maps a side tag to a vectorized callable
    ``f(x, y) -> (tx, ty)`` giving the traction (stress times outward normal).
    ``body_force`` is ``b(x, y) -> (bx, by)``; ``body_potential`` is the scalar
    ``V`` with ``b = -grad V`` when the body force derives from a potential.

    Annulus form: boundary values of the stress components themselves,
    ``boundary_stress[tag] = (srr_amp, srt_amp)`` for ``tag`` in
    ``{"inner", "outer"}``, modulated azimuthally by wavenumber ``m`` and trig
    ``parity`` ('cos': normal components follow cos(m th), shear follows
    sin(m th); 'sin' swaps the two).
    """

    def __init__(self, kind: str,
                 tractions: Mapping[str, Callable] | None = None,
                 body_force: Callable | None = None,
                 body_potential: Callable | None = None,
                 m: int | None = None,
                 parity: str | None = None,
                 boundary_stress: Mapping[str, tuple] | None = None):
        self.kind = kind
        self.tractions = dict(tractions or {})
        self.body_force = body_force
        self.body_potential = body_potential
        self.m = m
        self.parity = parity
        self.boundary_stress = dict(boundary_stress or {})
        if kind == "rectangle":
            bad = set(self.tractions) - {"left", "right", "bottom", "top"}
            if bad:
                raise LoadingError(f"unknown rectangle side tags {sorted(bad)}")
        elif kind == "annulus":
            if m is None or parity not in ("cos", "sin"):
                raise LoadingError("annulus loading requires wavenumber m and parity")
            bad = set(self.boundary_stress) - {"inner", "outer"}
            if bad:
                raise LoadingError(f"unknown annulus boundary tags {sorted(bad)}")
        else:
            raise LoadingError(f"unknown loading kind {kind!r}")

    @staticmethod
    def for_rectangle(tractions=None, body_force=None, body_potential=None):
        return LoadingSpec("rectangle", tractions=tractions, body_force=body_force,
                           body_potential=body_potential)

    @staticmethod
    def for_annulus(m: int, parity: str = "cos", inner=(0.0, 0.0), outer=(0.0, 0.0)):
        return LoadingSpec("annulus", m=m, parity=parity,
                           boundary_stress={"inner": tuple(inner), "outer": tuple(outer)})

    @staticmethod
    def free(kind: str = "rectangle", m: int = 0):
        """Traction-free loading."""
        if kind == "rectangle":
            return LoadingSpec.for_rectangle()
        return LoadingSpec.for_annulus(m)

    # -- resultants ---------------------------------------------------------

    def traction_at(self, tag: str, x, y):
        """Rectangle traction on side ``tag`` at points (x, y); zero if unspecified."""
        fn = self.tractions.get(tag)
        if fn is None:
            z = np.zeros_like(np.asarray(x, dtype=float))
            return z, z.copy()
        tx, ty = fn(x, y)
        shape = np.shape(x)
        return np.broadcast_to(tx, shape).astype(float), \
            np.broadcast_to(ty, shape).astype(float)

    def _circle_traction(self, tag: str, radius: float, th: np.ndarray):
        """Cartesian traction on the body along the circle r=radius (annulus)."""
        srr_amp, srt_amp = self.boundary_stress.get(tag, (0.0, 0.0))
        mm = self.m
        if self.parity == "cos":
            srr = srr_amp * np.cos(mm * th)
            srt = srt_amp * np.sin(mm * th)
        else:
            srr = srr_amp * np.sin(mm * th)
            srt = srt_amp * np.cos(mm * th)
        sign = 1.0 if tag == "outer" else -1.0  # outward normal of the body
        tr, tt = sign * srr, sign * srt
        tx = tr * np.cos(th) - tt * np.sin(th)
        ty = tr * np.sin(th) + tt * np.cos(th)
        return tx, ty

    def net_force(self, mesh) -> np.ndarray:
        """Total applied force (tractions plus body force)."""
        if self.kind == "annulus":
            F = np.zeros(2)
            th = _theta_grid()
            for tag, radius in (("inner", mesh.domain.r_a), ("outer", mesh.domain.r_b)):
                tx, ty = self._circle_traction(tag, radius, th)
                ds = radius * (th[1] - th[0])
                F += np.array([tx.sum(), ty.sum()]) * ds
            return F
        from . import fem2d
        ops = fem2d.rect_ops(mesh)
        F = np.zeros(2)
        for tag in ("left", "right", "bottom", "top"):
            ex, ey, ew = ops.edge_quad(tag)
            tx, ty = self.traction_at(tag, ex, ey)
            F += np.array([np.dot(ew, tx), np.dot(ew, ty)])
        if self.body_force is not None:
            bx, by = self.body_force(ops.qx, ops.qy)
            F += np.array([np.dot(ops.qw, np.broadcast_to(bx, ops.qx.shape)),
                           np.dot(ops.qw, np.broadcast_to(by, ops.qx.shape))])
        return F

    def net_moment(self, mesh) -> float:
        """Total applied moment about the origin."""
        if self.kind == "annulus":
            M = 0.0
            th = _theta_grid()
            for tag, radius in (("inner", mesh.domain.r_a), ("outer", mesh.domain.r_b)):
                tx, ty = self._circle_traction(tag, radius, th)
                x, y = radius * np.cos(th), radius * np.sin(th)
                ds = radius * (th[1] - th[0])
                M += np.sum(x * ty - y * tx) * ds
            return M
        from . import fem2d
        ops = fem2d.rect_ops(mesh)
        M = 0.0
        for tag in ("left", "right", "bottom", "top"):
            ex, ey, ew = ops.edge_quad(tag)
            tx, ty = self.traction_at(tag, ex, ey)
            M += np.dot(ew, ex * ty - ey * tx)
        if self.body_force is not None:
            bx, by = self.body_force(ops.qx, ops.qy)
            bx = np.broadcast_to(bx, ops.qx.shape)
            by = np.broadcast_to(by, ops.qx.shape)
            M += np.dot(ops.qw, ops.qx * by - ops.qy * bx)
        return M

    def hole_resultants(self, mesh) -> dict:
        """Net force and moment applied to the body along each hole boundary."""
        if self.kind != "annulus":
            return {}
        th = _theta_grid()
        radius = mesh.domain.r_a
        tx, ty = self._circle_traction("inner", radius, th)
        x, y = radius * np.cos(th), radius * np.sin(th)
        ds = radius * (th[1] - th[0])
        return {"inner": {
            "force": np.array([tx.sum() * ds, ty.sum() * ds]),
            "moment": float(np.sum(x * ty - y * tx) * ds),
        }}

    def validate(self, mesh, tol: float = 1e-10):
        """Check global self-equilibration of the loading."""
        F = self.net_force(mesh)
        M = self.net_moment(mesh)
        scale = max(1.0, self._magnitude())
        if np.abs(F).max() > tol * scale or abs(M) > tol * scale:
            raise LoadingError(
                f"loading is not self-equilibrated: net force {F}, net moment {M}")

    def _magnitude(self) -> float:
        if self.kind == "annulus":
            vals = [abs(v) for pair in self.boundary_stress.values() for v in pair]
            return max(vals, default=0.0)
        return 1.0


def _theta_grid(n: int = 1440) -> np.ndarray:
    # open uniform grid: trapezoid rule on the circle, exact for trig polynomials
    return np.arange(n) * (2 * np.pi / n)


# ---------------------------------------------------------------------------
# SBMESH text format
# ---------------------------------------------------------------------------

def save_mesh(mesh, path: str):
    """Write a mesh in the SBMESH 1 text format (atomic write)."""
    buf = io.StringIO()
    buf.write("SBMESH 1\n")
    if mesh.kind == "rectangle":
        coords = mesh.node_coords
        buf.write(f"nodes {mesh.n_nodes}\n")
        for x, y in coords:
            buf.write(f"{_COORD_FMT % x} {_COORD_FMT % y}\n")
        conn = mesh.connectivity()
        buf.write(f"elements {len(conn)}\n")
        for row in conn:
            buf.write(" ".join(str(int(i)) for i in row) + "\n")
        edges = mesh.boundary_edges()
        buf.write(f"boundary {len(edges)}\n")
        for n1, n2, tag in edges:
            buf.write(f"edge {n1} {n2} {tag}\n")
        nfeat = len(mesh.feature_x) + len(mesh.feature_y)
        if nfeat:
            buf.write(f"features {nfeat}\n")
            for v in mesh.feature_x:
                buf.write(f"x {_COORD_FMT % v}\n")
            for v in mesh.feature_y:
                buf.write(f"y {_COORD_FMT % v}\n")
    else:
        buf.write(f"nodes {mesh.n_nodes}\n")
        for r in mesh.nodes:
            buf.write(f"{_COORD_FMT % r} 0\n")
        conn = mesh.connectivity()
        buf.write(f"elements {len(conn)}\n")
        for row in conn:
            buf.write(" ".join(str(int(i)) for i in row) + "\n")
        edges = mesh.boundary_edges()
        buf.write(f"boundary {len(edges)}\n")
        for n1, n2, tag in edges:
            buf.write(f"edge {n1} {n2} {tag}\n")
    _atomic_write_text(path, buf.getvalue())


def _atomic_write_text(path: str, text: str):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-sb-")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _atomic_write_bytes(path: str, data: bytes):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-sb-")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_mesh(path: str):
    """Read and fully validate an SBMESH 1 file, reconstructing the mesh object."""
    with open(path) as f:
        lines = [ln.strip() for ln in f if ln.strip()]
    if not lines:
        raise MeshError(f"{path}: empty mesh file")
    if lines[0] != "SBMESH 1":
        raise MeshError(f"{path}: bad header {lines[0]!r}")
    pos = 1

    def expect_section(name):
        nonlocal pos
        if pos >= len(lines):
            raise MeshError(f"{path}: missing section {name!r}")
        parts = lines[pos].split()
        if len(parts) != 2 or parts[0] != name:
            raise MeshError(f"{path}: expected section {name!r}, got {lines[pos]!r}")
        pos += 1
        return int(parts[1])

    n = expect_section("nodes")
    try:
        coords = np.array([[float(v) for v in lines[pos + i].split()] for i in range(n)])
    except (ValueError, IndexError) as exc:
        raise MeshError(f"{path}: malformed node table: {exc}") from None
    pos += n
    m = expect_section("elements")
    try:
        conn = [np.array([int(v) for v in lines[pos + i].split()]) for i in range(m)]
    except (ValueError, IndexError) as exc:
        raise MeshError(f"{path}: malformed element table: {exc}") from None
    pos += m
    k = expect_section("boundary")
    edges = []
    for i in range(k):
        parts = lines[pos + i].split()
        if len(parts) != 4 or parts[0] != "edge":
            raise MeshError(f"{path}: malformed boundary line {lines[pos + i]!r}")
        edges.append((int(parts[1]), int(parts[2]), parts[3]))
    pos += k
    feat_x, feat_y = [], []
    if pos < len(lines) and lines[pos].startswith("features"):
        nf = int(lines[pos].split()[1])
        pos += 1
        for i in range(nf):
            axis, val = lines[pos + i].split()
            (feat_x if axis == "x" else feat_y).append(float(val))
        pos += nf

    for row in conn:
        if row.min() < 0 or row.max() >= n:
            raise MeshError(f"{path}: element references nonexistent node")

    radial = np.all(coords[:, 1] == 0.0) and all(len(r) == 3 for r in conn)
    if radial:
        r = coords[:, 0]
        nel = (len(r) - 1) // 2
        dom = Domain.annulus(r[0], r[-1])
        mesh = RadialMesh(dom, nel)
        if not np.allclose(mesh.nodes, r, rtol=0, atol=1e-12):
            raise MeshError(f"{path}: radial nodes are not a uniform quadratic grid")
        _check_edges(edges, mesh.boundary_edges(), path)
        return mesh

    if not all(len(r) == 9 for r in conn):
        raise MeshError(f"{path}: nonconforming element (expected 9-node quads)")
    node_x = np.unique(coords[:, 0])
    node_y = np.unique(coords[:, 1])
    if len(node_x) % 2 == 0 or len(node_y) % 2 == 0:
        raise MeshError(f"{path}: node grid is not a quadratic tensor grid")
    xs, ys = node_x[0::2], node_y[0::2]
    dom = Domain.rectangle(xs[-1] - xs[0], ys[-1] - ys[0])
    mesh = RectangleMesh(dom, xs, ys, feat_x, feat_y)
    if not np.allclose(mesh.node_coords, coords, rtol=0, atol=1e-12):
        raise MeshError(f"{path}: nodes are not in canonical tensor-grid order")
    ref = mesh.connectivity()
    if not np.array_equal(np.array(conn), ref):
        raise MeshError(f"{path}: nonconforming connectivity")
    _check_edges(edges, mesh.boundary_edges(), path)
    return mesh


def _check_edges(found, expected, path):
    fmap = {(n1, n2): tag for n1, n2, tag in found}
    for n1, n2, tag in expected:
        if (n1, n2) not in fmap:
            raise MeshError(f"{path}: boundary edge ({n1}, {n2}) is untagged")
        if fmap[(n1, n2)] != tag:
            raise MeshError(
                f"{path}: boundary edge ({n1}, {n2}) tagged {fmap[(n1, n2)]!r}, "
                f"expected {tag!r}")
    if len(fmap) != len(expected):
        extra = set(fmap) - {(n1, n2) for n1, n2, _ in expected}
        raise MeshError(f"{path}: unexpected boundary edges {sorted(extra)[:3]}")
