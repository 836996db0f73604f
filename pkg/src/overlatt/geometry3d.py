"""3D cell-ball volumes via spherical caps and their intersections.

For 0 < delta <= 1 the Voronoi cell has 14 faces (6 from the +-basis
columns at r1, 6 from +-column pair sums at r2, 2 from the +-diagonal at
r3), 36 edges in five subtypes at r4 and r5, and 24 vertices at r6, the
covering radius.  For delta > 1 the cell has 12 faces and the vertices
split into two apexes at s1 and six four-valent vertices at s2.

vol(cell ∩ ball) is computed by inclusion-exclusion over the face caps:
ball volume, minus caps, plus pairwise cap intersections, minus triple
intersections.  Pair and triple terms enter once the ball reaches the
least-norm point beyond the corresponding planes (a tiny active-set QP).
Triple regions only appear below the covering radius for delta > 1, in
the band s1 < r < s2; for delta <= 1 every activating triple is the
containment-degenerate kind that cancels its pair term exactly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .lattice import DistortedLattice, covering_radius, unit_ball_volume

_SQRT2 = math.sqrt(2.0)
_SQRT3 = math.sqrt(3.0)

#: plane, edge and vertex multiplicities of the delta <= 1 catalog
CATALOG_COUNTS = (6, 6, 2, 18, 18, 24)


@dataclass(frozen=True)
class CriticalRadii3D:
    """Face, edge and vertex distances of the cell for delta in (0, 1]."""

    r1: float  # 6 faces, +-basis columns
    r2: float  # 6 faces, +-column pair sums
    r3: float  # 2 faces, +-diagonal
    r4: float  # 18 edges joining two single-column-type faces
    r5: float  # 18 edges involving the diagonal-type neighbors
    r6: float  # 24 vertices; equals the covering radius
    delta: float


@dataclass(frozen=True)
class DualRadii3D:
    """Vertex distances of the cell for delta >= 1."""

    s1: float  # 2 apex vertices on the diagonal axis
    s2: float  # 6 four-valent vertices; equals the covering radius
    delta: float


def critical_radii_3d(delta: float) -> CriticalRadii3D:
    """The six critical radii for delta in (0, 1]."""
    if not (0.0 < delta <= 1.0) or not math.isfinite(delta):
        raise ValueError(f"catalog covers delta in (0, 1], got {delta}")
    d2 = delta * delta
    r1 = math.sqrt((d2 + 2.0) / 12.0)
    r2 = math.sqrt((2.0 * d2 + 1.0) / 6.0)
    r3 = delta * _SQRT3 / 2.0
    r4 = (d2 + 2.0) / (3.0 * _SQRT2)
    r5 = math.sqrt((d2 + 2.0) * (2.0 * d2 + 1.0)) / (2.0 * _SQRT3)
    r6 = math.sqrt(8.0 * d2 * d2 + 11.0 * d2 + 8.0) / 6.0
    return CriticalRadii3D(r1, r2, r3, r4, r5, r6, delta)


def dual_radii_3d(delta: float) -> DualRadii3D:
    """The two vertex radii for delta >= 1."""
    if not (delta >= 1.0) or not math.isfinite(delta):
        raise ValueError(f"dual catalog covers delta >= 1, got {delta}")
    d2 = delta * delta
    s1 = (d2 + 2.0) / (2.0 * _SQRT3 * delta)
    s2 = math.sqrt(d2 + 8.0) / (2.0 * _SQRT3)
    return DualRadii3D(s1, s2, delta)


def ordering_regime(delta: float) -> int:
    """Which of the four radius orderings holds; ties go to the lower tag.

    Decided by direct comparison of the evaluated radii, not by threshold
    constants: regime 1 has r3 <= r1, regime 2 has r1 < r3 <= r2, regime 3
    has r2 < r3 <= r4, regime 4 has r4 < r3.
    """
    rad = critical_radii_3d(delta)
    if rad.r3 <= rad.r1:
        return 1
    if rad.r3 <= rad.r2:
        return 2
    if rad.r3 <= rad.r4:
        return 3
    return 4


# -- cap volumes -------------------------------------------------------------


def spherical_cap_volume(r: float, d: float) -> float:
    """Volume of the ball part beyond a plane at distance d from the center.

    Zero once d >= r; the full ball once d <= -r.
    """
    if not (r >= 0.0) or not math.isfinite(r):
        raise ValueError(f"radius must be finite and >= 0, got {r}")
    if d >= r:
        return 0.0
    if d <= -r:
        return 4.0 * math.pi * r ** 3 / 3.0
    return math.pi / 3.0 * (r - d) ** 2 * (2.0 * r + d)


def _clamp(x: float) -> float:
    return min(1.0, max(-1.0, x))


def _unit_normal(nrm) -> np.ndarray:
    n = np.asarray(nrm, dtype=float)
    if abs(float(np.linalg.norm(n)) - 1.0) >= 1e-12:
        raise ValueError("plane normals must be unit vectors")
    return n


def _segment_area(rho: float, c: float) -> float:
    """Area of the disk part {y in disk(rho) : <y, u> >= c} for unit u."""
    if c <= -rho:
        return math.pi * rho * rho
    if c >= rho:
        return 0.0
    return rho * rho * math.acos(c / rho) - c * math.sqrt(rho * rho - c * c)


def cap_pair_intersection_volume(r: float, plane1, plane2) -> float:
    """Volume of the ball region beyond both planes (a spherical lens).

    Each plane is (unit normal, signed distance from the ball center).
    Divergence theorem: 3V = r * A_sphere - d1 * A_face1 - d2 * A_face2,
    with the spherical patch area from the two cone half-angles and the
    dihedral geometry, and each flat face a circular segment.
    """
    if not (r >= 0.0) or not math.isfinite(r):
        raise ValueError(f"radius must be finite and >= 0, got {r}")
    n1, d1 = plane1
    n2, d2 = plane2
    n1 = _unit_normal(n1)
    n2 = _unit_normal(n2)
    if r == 0.0 or d1 >= r or d2 >= r:
        return 0.0
    if d1 <= -r:
        return spherical_cap_volume(r, d2)
    if d2 <= -r:
        return spherical_cap_volume(r, d1)
    cg = _clamp(float(n1 @ n2))
    gamma = math.acos(cg)
    if gamma < 1e-12:
        return spherical_cap_volume(r, max(d1, d2))
    if gamma > math.pi - 1e-12:
        # antiparallel normals bound a slab
        return max(0.0, spherical_cap_volume(r, d1)
                   - spherical_cap_volume(r, -d2))
    th1 = math.acos(_clamp(d1 / r))
    th2 = math.acos(_clamp(d2 / r))
    if gamma >= th1 + th2:
        return 0.0
    if gamma <= abs(th1 - th2):
        # one cap contains the other
        return spherical_cap_volume(r, max(d1, d2))
    sg = math.sin(gamma)
    c1, s1 = d1 / r, math.sin(th1)
    c2, s2 = d2 / r, math.sin(th2)
    alpha_p = math.acos(_clamp((cg - c1 * c2) / (s1 * s2)))
    alpha_a = math.acos(_clamp((c2 - c1 * cg) / (s1 * sg)))
    alpha_b = math.acos(_clamp((c1 - c2 * cg) / (s2 * sg)))
    a_sphere = 2.0 * r * r * ((math.pi - alpha_p)
                              - alpha_a * c1 - alpha_b * c2)
    rho1 = math.sqrt(max(r * r - d1 * d1, 0.0))
    rho2 = math.sqrt(max(r * r - d2 * d2, 0.0))
    e1 = (d2 - d1 * cg) / sg
    e2 = (d1 - d2 * cg) / sg
    a_face1 = _segment_area(rho1, e1)
    a_face2 = _segment_area(rho2, e2)
    vol = (r * a_sphere - d1 * a_face1 - d2 * a_face2) / 3.0
    return max(vol, 0.0)


# -- least-norm activation of a halfspace intersection -----------------------


def _activation_radius(normals: np.ndarray, dists: np.ndarray) -> float:
    """Norm of the least-norm point with <x, n_i> >= d_i for every i.

    Enumerates active subsets; the least-norm point on each active affine
    set that is feasible for the rest is a candidate, and the true minimum
    is among them.  Returns inf when the intersection is empty.
    """
    m = len(dists)
    if all(d <= 0.0 for d in dists):
        return 0.0
    best = math.inf
    for mask in range(1, 1 << m):
        idx = [i for i in range(m) if mask >> i & 1]
        a = normals[idx]
        g = a @ a.T
        try:
            lam = np.linalg.solve(g, dists[idx])
        except np.linalg.LinAlgError:
            continue
        x = a.T @ lam
        # a singular active set can slip past solve() with garbage lam;
        # a genuine candidate satisfies its own equalities
        if float(np.max(np.abs(a @ x - dists[idx]))) > 1e-9:
            continue
        feasible = True
        for j in range(m):
            if not (mask >> j & 1) and float(x @ normals[j]) < dists[j] - 1e-12:
                feasible = False
                break
        if feasible:
            best = min(best, float(np.linalg.norm(x)))
    return best


# -- triple intersections -----------------------------------------------------


def _disk_two_halfplanes(rho: float, u1, e1: float, u2, e2: float) -> float:
    """Area of disk(rho) cut by <y, u1> >= e1 and <y, u2> >= e2."""
    tol = 1e-12 * max(1.0, rho)
    verts = []
    for (u, e), (uo, eo) in (((u1, e1), (u2, e2)), ((u2, e2), (u1, e1))):
        h2 = rho * rho - e * e
        if h2 <= 0.0:
            continue
        h = math.sqrt(h2)
        px, py = e * u[0], e * u[1]
        qx, qy = -u[1], u[0]
        for sgn in (1.0, -1.0):
            y = (px + sgn * h * qx, py + sgn * h * qy)
            if y[0] * uo[0] + y[1] * uo[1] >= eo - tol:
                verts.append(y)
    det = u1[0] * u2[1] - u1[1] * u2[0]
    if abs(det) > 1e-12:
        y = ((e1 * u2[1] - e2 * u1[1]) / det,
             (u1[0] * e2 - u2[0] * e1) / det)
        if y[0] * y[0] + y[1] * y[1] <= rho * rho * (1.0 + 1e-12):
            verts.append(y)
    uniq = []
    for y in verts:
        if all((y[0] - z[0]) ** 2 + (y[1] - z[1]) ** 2 > tol * tol
               for z in uniq):
            uniq.append(y)
    if len(uniq) < 2:
        return 0.0
    cx = sum(y[0] for y in uniq) / len(uniq)
    cy = sum(y[1] for y in uniq) / len(uniq)
    uniq.sort(key=lambda y: math.atan2(y[1] - cy, y[0] - cx))
    on_circle = [abs(math.hypot(*y) - rho) < 1e-9 * max(1.0, rho)
                 for y in uniq]
    area = 0.0
    for k in range(len(uniq)):
        ax, ay = uniq[k]
        bx, by = uniq[(k + 1) % len(uniq)]
        if on_circle[k] and on_circle[(k + 1) % len(uniq)]:
            ta = math.atan2(ay, ax)
            dth = (math.atan2(by, bx) - ta) % (2.0 * math.pi)
            tm = ta + 0.5 * dth
            mx, my = rho * math.cos(tm), rho * math.sin(tm)
            if (mx * u1[0] + my * u1[1] >= e1 - tol
                    and mx * u2[0] + my * u2[1] >= e2 - tol):
                area += 0.5 * rho * rho * dth
                continue
        area += 0.5 * (ax * by - bx * ay)
    return max(area, 0.0)


def _slice_area(rho: float, constraints) -> float:
    """Area of disk(rho) under up to two in-slice halfplane constraints."""
    if rho <= 0.0:
        return 0.0
    active = []
    for u, e in constraints:
        if e >= rho:
            return 0.0
        if e > -rho:
            active.append((u, e))
    if not active:
        return math.pi * rho * rho
    if len(active) == 1:
        return _segment_area(rho, active[0][1])
    (u1, e1), (u2, e2) = active
    return _disk_two_halfplanes(rho, u1, e1, u2, e2)


def cap_triple_intersection_volume(r: float, plane1, plane2, plane3) -> float:
    """Volume of the ball region beyond all three planes.

    If one plane is a nonnegative combination of the other two that its
    offset makes redundant on their lens, the region degenerates to that
    pair lens and the pair closed form is returned (this keeps the
    inclusion-exclusion cancellation exact).  Otherwise the volume is
    integrated over slices perpendicular to the deepest plane's normal;
    each slice is a disk cut by at most two halfplanes.
    """
    if not (r >= 0.0) or not math.isfinite(r):
        raise ValueError(f"radius must be finite and >= 0, got {r}")
    planes = [(plane1[0], float(plane1[1])), (plane2[0], float(plane2[1])),
              (plane3[0], float(plane3[1]))]
    normals = [_unit_normal(nrm) for nrm, _ in planes]
    dists = [d for _, d in planes]
    if r == 0.0 or any(d >= r for d in dists):
        return 0.0
    for k in range(3):
        if dists[k] <= -r:
            i, j = [t for t in range(3) if t != k]
            return cap_pair_intersection_volume(
                r, (normals[i], dists[i]), (normals[j], dists[j]))
    # redundancy: n_k = alpha n_i + beta n_j with alpha, beta >= 0 and
    # alpha d_i + beta d_j >= d_k makes constraint k implied on the lens
    for k in range(3):
        i, j = [t for t in range(3) if t != k]
        m = np.column_stack([normals[i], normals[j]])
        sol, *_ = np.linalg.lstsq(m, normals[k], rcond=None)
        if float(np.linalg.norm(m @ sol - normals[k])) < 1e-10:
            alpha, beta = float(sol[0]), float(sol[1])
            if (alpha >= -1e-12 and beta >= -1e-12
                    and alpha * dists[i] + beta * dists[j]
                    >= dists[k] - 1e-12):
                return cap_pair_intersection_volume(
                    r, (normals[i], dists[i]), (normals[j], dists[j]))
    if _activation_radius(np.array(normals), np.array(dists)) >= r:
        return 0.0

    # slice along the deepest plane's normal
    order = sorted(range(3), key=lambda t: -dists[t])
    ns = normals[order[0]]
    t_lo, t_hi = dists[order[0]], r
    # in-slice orthonormal frame
    pick = np.eye(3)[int(np.argmin(np.abs(ns)))]
    f1 = pick - float(pick @ ns) * ns
    f1 /= np.linalg.norm(f1)
    f2 = np.cross(ns, f1)

    folded = []
    breaks = []
    for t_idx in order[1:]:
        ni, di = normals[t_idx], dists[t_idx]
        ci = float(ni @ ns)
        perp = ni - ci * ns
        si = float(np.linalg.norm(perp))
        if si < 1e-12:
            # constraint is collinear with the slice axis
            if ci > 0.0:
                t_lo = max(t_lo, di / ci)
            else:
                t_hi = min(t_hi, di / ci)
            continue
        u = (float(perp @ f1) / si, float(perp @ f2) / si)
        folded.append((u, ci, si, di))
        disc = r * r - di * di
        if disc > 0.0:
            root = si * math.sqrt(disc)
            breaks.extend([di * ci - root, di * ci + root])
    if len(folded) == 2:
        # track where the two in-slice lines' vertex crosses the circle
        (ua, ca, sa, da), (ub, cb, sb, db) = folded
        det = ua[0] * ub[1] - ua[1] * ub[0]
        if abs(det) > 1e-12:
            # e_i(t) = (d_i - t c_i) / s_i is linear in t
            pa, qa = da / sa, -ca / sa
            pb, qb = db / sb, -cb / sb
            px = (pa * ub[1] - pb * ua[1]) / det
            py = (ua[0] * pb - ub[0] * pa) / det
            qx = (qa * ub[1] - qb * ua[1]) / det
            qy = (ua[0] * qb - ub[0] * qa) / det
            aa = qx * qx + qy * qy + 1.0
            bb = 2.0 * (px * qx + py * qy)
            cc = px * px + py * py - r * r
            disc = bb * bb - 4.0 * aa * cc
            if disc > 0.0:
                sq = math.sqrt(disc)
                breaks.extend([(-bb - sq) / (2.0 * aa),
                               (-bb + sq) / (2.0 * aa)])
    if t_hi <= t_lo:
        return 0.0

    def integrand(t: float) -> float:
        rho2 = r * r - t * t
        if rho2 <= 0.0:
            return 0.0
        rho = math.sqrt(rho2)
        cons = [(u, (di - t * ci) / si) for u, ci, si, di in folded]
        return _slice_area(rho, cons)

    points = sorted({b for b in breaks if t_lo < b < t_hi})
    val, _ = quad(integrand, t_lo, t_hi, points=points or None,
                  limit=200, epsabs=1e-12, epsrel=1e-10)
    return max(val, 0.0)


# -- the cap arrangement of a cell -------------------------------------------


@dataclass(frozen=True)
class Plane:
    """One cell face: integer coefficient vector, unit normal, distance."""

    coeffs: tuple
    normal: np.ndarray = field(compare=False)
    distance: float = 0.0
    multiplicity: int = 0


@dataclass(frozen=True)
class Edge:
    """One cell edge: the face pair it joins, its line distance, subtype."""

    planes: tuple
    distance: float
    subtype: str


@dataclass(frozen=True)
class Vertex:
    """One cell vertex: position, distance from the center, face valence."""

    position: np.ndarray = field(compare=False)
    distance: float = 0.0
    valence: int = 0


@dataclass(frozen=True)
class CapArrangement:
    """Faces, edges and vertices of a cell, plus the activation tables.

    pair_terms and triple_terms list every face pair / triple whose
    halfspace intersection comes within 1.02x the covering radius, with
    its activation distance; inclusion-exclusion walks these tables.
    degenerate flags deltas within 1e-9 of 1, where the face count
    changes and four-fold contacts make the combinatorics unstable.
    """

    delta: float
    degenerate: bool
    planes: tuple
    edges: tuple
    vertices: tuple
    pair_terms: tuple
    triple_terms: tuple

    def plane_distance_multiset(self):
        """Face distances with multiplicities, as {distance: count}."""
        out = {}
        for p in self.planes:
            key = round(p.distance, 9)
            out[key] = out.get(key, 0) + 1
        return out

    def edge_subtype_counts(self):
        """Edge counts per subtype tag."""
        out = {}
        for e in self.edges:
            out[e.subtype] = out.get(e.subtype, 0) + 1
        return out

    def vertex_distance_multiset(self):
        """Vertex distances with multiplicities, as {distance: count}."""
        out = {}
        for v in self.vertices:
            key = round(v.distance, 9)
            out[key] = out.get(key, 0) + 1
        return out


def _coeff_type(v) -> int:
    """Classify an integer vector by its nonzero pattern.

    1: single +-e_i, 2: same-sign pair sum, 3: +-full diagonal,
    4: mixed-sign pair, 5: mixed-sign triple, 0: anything else.
    """
    nz = sorted(abs(int(x)) for x in v if x != 0)
    pos = sum(1 for x in v if x > 0)
    neg = sum(1 for x in v if x < 0)
    if nz == [1]:
        return 1
    if nz == [1, 1]:
        return 2 if pos == 2 or neg == 2 else 4
    if nz == [1, 1, 1]:
        return 3 if pos == 3 or neg == 3 else 5
    return 0


def _line_foot(n1: np.ndarray, d1: float, n2: np.ndarray, d2: float):
    """Least-norm point on the intersection line of two planes."""
    a = float(n1 @ n2)
    det = 1.0 - a * a
    if det < 1e-14:
        return None
    return ((d1 - a * d2) * n1 + (d2 - a * d1) * n2) / det


@lru_cache(maxsize=64)
def _build_arrangement(delta: float) -> CapArrangement:
    lat = DistortedLattice(3, delta)
    basis_t = lat.basis.T
    cov = covering_radius(lat)

    # face determination: Bv/2 must be strictly closer to 0 (and Bv) than
    # to every other lattice point in the window; ties mean the contact
    # is lower-dimensional and v is not a face
    coeffs = np.array([c for c in itertools.product((-2, -1, 0, 1, 2),
                                                    repeat=3)
                       if c != (0, 0, 0)], dtype=float)
    pts = coeffs @ basis_t
    planes = []
    for v, p in zip(coeffs, pts):
        mid = p / 2.0
        d2_all = np.einsum("ij,ij->i", pts - mid, pts - mid)
        d2_all[np.all(coeffs == v, axis=1)] = np.inf
        mid2 = float(mid @ mid)
        gap = float(d2_all.min()) - mid2
        if gap > 1e-9 * max(1.0, mid2):
            nrm = float(np.linalg.norm(p))
            planes.append((tuple(int(x) for x in v), p / nrm, nrm / 2.0))

    by_dist = {}
    for _, _, d in planes:
        key = round(d, 9)
        by_dist[key] = by_dist.get(key, 0) + 1
    plane_objs = tuple(
        Plane(coeffs=c, normal=n, distance=d,
              multiplicity=by_dist[round(d, 9)])
        for c, n, d in planes)

    normals = np.array([p.normal for p in plane_objs])
    dists = np.array([p.distance for p in plane_objs])
    npl = len(plane_objs)

    # cell edges: face pairs whose plane intersection line, clipped by the
    # remaining halfspaces, leaves a segment of positive length (a line
    # only touching a four-valent vertex is not an edge)
    tol = 1e-9
    edges = []
    for i, j in itertools.combinations(range(npl), 2):
        foot = _line_foot(normals[i], dists[i], normals[j], dists[j])
        if foot is None:
            continue
        direction = np.cross(normals[i], normals[j])
        direction /= np.linalg.norm(direction)
        t_lo, t_hi = -math.inf, math.inf
        for k in range(npl):
            if k == i or k == j:
                continue
            num = dists[k] - float(foot @ normals[k])
            den = float(direction @ normals[k])
            if abs(den) < 1e-14:
                if num < -tol:
                    t_lo, t_hi = math.inf, -math.inf
                    break
                continue
            t = num / den
            if den > 0.0:
                t_hi = min(t_hi, t)
            else:
                t_lo = max(t_lo, t)
        if t_hi - t_lo > 1e-8:
            ti = _coeff_type(plane_objs[i].coeffs)
            tj = _coeff_type(plane_objs[j].coeffs)
            tdiff = _coeff_type(np.subtract(plane_objs[i].coeffs,
                                            plane_objs[j].coeffs))
            tag = f"{min(ti, tj)}{max(ti, tj)}|{tdiff}"
            edges.append(Edge(planes=(i, j),
                              distance=float(np.linalg.norm(foot)),
                              subtype=tag))

    # cell vertices: feasible triple intersections, deduplicated
    raw_verts = []
    for i, j, k in itertools.combinations(range(npl), 3):
        a = normals[[i, j, k]]
        if abs(np.linalg.det(a)) < 1e-10:
            continue
        x = np.linalg.solve(a, dists[[i, j, k]])
        if np.all(normals @ x - dists <= tol):
            raw_verts.append(x)
    verts = []
    for x in raw_verts:
        if all(np.linalg.norm(x - y) > 1e-8 for y in verts):
            verts.append(x)
    vertex_objs = tuple(
        Vertex(position=x, distance=float(np.linalg.norm(x)),
               valence=int(np.sum(np.abs(normals @ x - dists) < 1e-8)))
        for x in verts)

    # activation tables for inclusion-exclusion
    cutoff = cov * 1.02
    pair_terms = []
    for i, j in itertools.combinations(range(npl), 2):
        act = _activation_radius(normals[[i, j]], dists[[i, j]])
        if act < cutoff:
            pair_terms.append((i, j, act))
    triple_terms = []
    for i, j, k in itertools.combinations(range(npl), 3):
        act = _activation_radius(normals[[i, j, k]], dists[[i, j, k]])
        if act < cutoff:
            triple_terms.append((i, j, k, act))

    return CapArrangement(delta=delta,
                          degenerate=abs(delta - 1.0) < 1e-9,
                          planes=plane_objs,
                          edges=tuple(edges),
                          vertices=vertex_objs,
                          pair_terms=tuple(pair_terms),
                          triple_terms=tuple(triple_terms))


def build_cap_arrangement(delta: float) -> CapArrangement:
    """Faces, edges, vertices and activation tables of the cell."""
    if not (delta > 0.0) or not math.isfinite(delta):
        raise ValueError(f"distortion must be finite and > 0, got {delta}")
    return _build_arrangement(float(delta))


# -- inclusion-exclusion ------------------------------------------------------


def _inclusion_exclusion(arr: CapArrangement, r: float) -> float:
    """Raw cap sum; exact below the first four-plane activation."""
    vol = unit_ball_volume(3) * r ** 3
    for p in arr.planes:
        if p.distance < r:
            vol -= spherical_cap_volume(r, p.distance)
    for i, j, act in arr.pair_terms:
        if act < r:
            pi, pj = arr.planes[i], arr.planes[j]
            vol += cap_pair_intersection_volume(
                r, (pi.normal, pi.distance), (pj.normal, pj.distance))
    for i, j, k, act in arr.triple_terms:
        if act < r:
            pi, pj, pk = arr.planes[i], arr.planes[j], arr.planes[k]
            vol -= cap_triple_intersection_volume(
                r, (pi.normal, pi.distance), (pj.normal, pj.distance),
                (pk.normal, pk.distance))
    return vol


def voronoi_ball_volume_3d(delta: float, r: float) -> float:
    """vol(cell ∩ ball(r)) for the 3D cell of distortion delta.

    Equals the full ball volume while the ball fits inside the cell and
    the cell volume delta once r reaches the covering radius.
    """
    if not (delta > 0.0) or not math.isfinite(delta):
        raise ValueError(f"distortion must be finite and > 0, got {delta}")
    if not (r >= 0.0) or not math.isfinite(r):
        raise ValueError(f"radius must be finite and >= 0, got {r}")
    lat = DistortedLattice(3, delta)
    if r >= covering_radius(lat):
        return delta
    arr = build_cap_arrangement(delta)
    if r <= min(p.distance for p in arr.planes):
        return unit_ball_volume(3) * r ** 3
    return _inclusion_exclusion(arr, r)


def vol_overlap_3d(delta: float, r: float) -> float:
    """Average overlapping volume per sphere, normalized by cell volume."""
    ball = unit_ball_volume(3) * r ** 3
    return max(0.0, (ball - voronoi_ball_volume_3d(delta, r)) / delta)
