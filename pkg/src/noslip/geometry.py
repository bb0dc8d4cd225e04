"""Cross-section curves, billiard boundaries, and the tube hypersurface chart.

Orientation conventions (every downstream equation depends on these):

* The boundary of a cross-section region C is parametrized by arclength s with
  unit tangent e2(s) = gamma'(s) and e1(s) = -J e2(s), where J is the positive
  (counterclockwise) quarter turn.  e1 points away from C (outward for a disc
  wall, into the scatterer for a Sinai hole).
* Signed curvature is defined by d e1/ds = -kappa(s) e2, so a disc of radius R
  has kappa = -1/R and a circular scatterer of radius rho has kappa = +1/rho.
  Straight walls have kappa = 0.
* For billiards in the region C the inward unit normal is nu = -e1, and the
  oriented boundary tangent (region on the left) is e2 = -J nu.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import CornerEventError, DomainError, FocalPointError

__all__ = [
    "CircleArc",
    "LineWall",
    "CrossSection",
    "DiscSection",
    "StripSection",
    "SinaiSquareSection",
    "SinaiTorusSection",
    "make_section",
    "boundary_data",
    "curvature_factors",
    "shape_eigen",
    "TubeChart",
    "ArclengthProfile",
    "stadium_profile",
]


def rot90(v):
    """Positive (counterclockwise) quarter turn of a plane vector."""
    return np.array([-v[1], v[0]])


# ---------------------------------------------------------------------------
# Boundary components
# ---------------------------------------------------------------------------


class LineWall:
    """Straight boundary piece: gamma(s) = p0 + s*e2, kappa = 0.

    ``span`` limits s to a segment (square walls); None means the full line.
    """

    def __init__(self, p0, e1, span=None, name="line"):
        self.p0 = np.asarray(p0, float)
        self.e1 = np.asarray(e1, float)
        self.e2 = rot90(self.e1)
        self.span = span
        self.name = name

    def point(self, s):
        return self.p0 + s * self.e2

    def frame(self, s):
        return self.e1, self.e2

    def kappa(self, s):
        return 0.0

    def locate(self, x):
        """(s, distance to the line) of the foot point of x."""
        d = np.asarray(x, float) - self.p0
        return float(d @ self.e2), abs(float(d @ self.e1))

    def in_span(self, s, margin=0.0):
        if self.span is None:
            return True
        return self.span[0] + margin <= s <= self.span[1] - margin


class CircleArc:
    """Full-circle boundary piece.

    ``orientation`` +1: the region lies inside the circle (disc wall,
    kappa = -1/R); -1: the region lies outside (scatterer, kappa = +1/R).
    gamma(s) traverses the circle keeping the region on the left.
    """

    def __init__(self, center, radius, orientation=1, theta0=0.0, name="circle"):
        if radius <= 0:
            raise DomainError(f"circle radius must be positive, got {radius}")
        if orientation not in (1, -1):
            raise DomainError("orientation must be +1 or -1")
        self.center = np.asarray(center, float)
        self.radius = float(radius)
        self.orientation = orientation
        self.theta0 = float(theta0)
        self.name = name
        self.period = 2.0 * math.pi * self.radius

    def _theta(self, s):
        return self.theta0 + self.orientation * s / self.radius

    def point(self, s):
        t = self._theta(s)
        return self.center + self.radius * np.array([math.cos(t), math.sin(t)])

    def frame(self, s):
        t = self._theta(s)
        e1 = self.orientation * np.array([math.cos(t), math.sin(t)])
        return e1, rot90(e1)

    def kappa(self, s):
        return -self.orientation / self.radius

    def locate(self, x):
        d = np.asarray(x, float) - self.center
        rho = float(np.hypot(d[0], d[1]))
        theta = math.atan2(d[1], d[0])
        s = (self.orientation * (theta - self.theta0) * self.radius) % self.period
        return s, abs(rho - self.radius)

    def in_span(self, s, margin=0.0):
        return True


# ---------------------------------------------------------------------------
# Cross-sections
# ---------------------------------------------------------------------------


class CrossSection:
    """A planar region described by its smooth boundary pieces."""

    kind = "generic"

    def __init__(self, walls, periodic_cell=None):
        self.walls = tuple(walls)
        self.periodic_cell = periodic_cell

    def contains(self, x, tol=0.0):
        raise NotImplementedError

    def params(self):
        raise NotImplementedError

    def locate_wall(self, a, atol=1e-9):
        """Identify the wall through boundary point ``a``; returns (index, s).

        Raises CornerEventError when ``a`` is within ``atol`` of two walls or
        of a segment endpoint.
        """
        a = np.asarray(a, float)
        hits = []
        for i, w in enumerate(self.walls):
            s, dist = w.locate(a)
            if dist <= max(atol, 1e-9) and w.in_span(s, margin=-atol):
                hits.append((i, s))
        if not hits:
            raise DomainError(f"point {a} is not on the boundary")
        if len(hits) > 1:
            raise CornerEventError(f"point {a} lies on a boundary corner")
        i, s = hits[0]
        w = self.walls[i]
        if isinstance(w, LineWall) and w.span is not None:
            if s - w.span[0] < atol or w.span[1] - s < atol:
                raise CornerEventError(f"point {a} lies within {atol} of a corner")
        return i, s

    def __repr__(self):
        return f"{type(self).__name__}({self.params()})"


class DiscSection(CrossSection):
    """Disc of radius R centered at the origin; boundary kappa = -1/R."""

    kind = "disc"

    def __init__(self, R=1.0):
        if R <= 0:
            raise DomainError(f"disc radius must be positive, got {R}")
        self.R = float(R)
        super().__init__([CircleArc(np.zeros(2), self.R, orientation=1, name="disc")])

    def contains(self, x, tol=0.0):
        x = np.asarray(x, float)
        return float(np.hypot(x[0], x[1])) <= self.R + tol

    def params(self):
        return {"kind": "disc", "R": self.R}


class StripSection(CrossSection):
    """Strip |x1| <= L/2 between two parallel walls; kappa = 0."""

    kind = "strip"

    def __init__(self, L=1.0):
        if L <= 0:
            raise DomainError(f"strip width must be positive, got {L}")
        self.L = float(L)
        super().__init__(
            [
                LineWall([L / 2, 0.0], [1.0, 0.0], name="right"),
                LineWall([-L / 2, 0.0], [-1.0, 0.0], name="left"),
            ]
        )

    def contains(self, x, tol=0.0):
        return abs(float(np.asarray(x, float)[0])) <= self.L / 2 + tol

    def params(self):
        return {"kind": "strip", "L": self.L}


def _square_walls(A):
    # counterclockwise chain; e1 outward, spans chosen so e2 runs the chain
    return [
        LineWall([A, -A], [1.0, 0.0], (0.0, 2 * A), "right"),
        LineWall([A, A], [0.0, 1.0], (0.0, 2 * A), "top"),
        LineWall([-A, A], [-1.0, 0.0], (0.0, 2 * A), "left"),
        LineWall([-A, -A], [0.0, -1.0], (0.0, 2 * A), "bottom"),
    ]


class SinaiSquareSection(CrossSection):
    """Square table |x_i| <= A with a circular scatterer; scatterer kappa = +1/rho."""

    kind = "sinai"

    def __init__(self, A=1.0, scatter_radius=0.3, scatter_center=(0.0, 0.0)):
        if scatter_radius <= 0 or scatter_radius >= A:
            raise DomainError("scatterer must have 0 < radius < A")
        self.A = float(A)
        self.scatter_radius = float(scatter_radius)
        self.scatter_center = (float(scatter_center[0]), float(scatter_center[1]))
        scatterer = CircleArc(
            self.scatter_center, self.scatter_radius, orientation=-1, name="scatterer"
        )
        super().__init__(_square_walls(self.A) + [scatterer])

    def contains(self, x, tol=0.0):
        x = np.asarray(x, float)[:2]
        c = np.asarray(self.scatter_center)
        inside_square = bool(np.all(np.abs(x) <= self.A + tol))
        return inside_square and float(np.hypot(*(x - c))) >= self.scatter_radius - tol

    def params(self):
        return {
            "kind": "sinai",
            "A": self.A,
            "scatter_radius": self.scatter_radius,
            "scatter_center": list(self.scatter_center),
        }


class SinaiTorusSection(CrossSection):
    """Torus cell [-A, A)^2 with a circular scatterer removed (Lorentz-gas variant)."""

    kind = "sinai_torus"

    def __init__(self, A=1.0, scatter_radius=0.3):
        if scatter_radius <= 0 or scatter_radius >= A:
            raise DomainError("scatterer must have 0 < radius < A")
        self.A = float(A)
        self.scatter_radius = float(scatter_radius)
        scatterer = CircleArc(np.zeros(2), self.scatter_radius, orientation=-1, name="scatterer")
        super().__init__([scatterer], periodic_cell=self.A)

    def contains(self, x, tol=0.0):
        x = np.asarray(x, float)[:2]
        x = (x + self.A) % (2 * self.A) - self.A
        return float(np.hypot(x[0], x[1])) >= self.scatter_radius - tol

    def params(self):
        return {"kind": "sinai_torus", "A": self.A, "scatter_radius": self.scatter_radius}


_SECTION_KINDS = {
    "disc": DiscSection,
    "strip": StripSection,
    "sinai": SinaiSquareSection,
    "sinai_torus": SinaiTorusSection,
}


def make_section(kind, **params):
    """Build a cross-section from its configuration kind and parameters."""
    try:
        cls = _SECTION_KINDS[kind]
    except KeyError:
        raise DomainError(f"unknown cross-section kind {kind!r}") from None
    return cls(**params)


def boundary_data(section, a, atol=1e-9):
    """Billiard boundary data at a regular boundary point ``a``.

    Returns (nu, tau, kappa): inward unit normal, oriented unit tangent
    (region on the left, tau = -J nu), and the wall's signed curvature.
    Raises CornerEventError at nonsmooth points.
    """
    i, s = section.locate_wall(np.asarray(a, float), atol=atol)
    w = section.walls[i]
    e1, e2 = w.frame(s)
    return -e1, e2, w.kappa(s)


# ---------------------------------------------------------------------------
# Tube hypersurface around a cylinder P = C x R
# ---------------------------------------------------------------------------


def curvature_factors(kappa, phi, r):
    """The two curvature factors of the tube chart.

    f_c = kappa*cos(phi) / (1 - r*kappa*sin(phi)),
    f_s = kappa*sin(phi) / (1 - r*kappa*sin(phi)).
    Raises FocalPointError when the shared denominator is not positive.
    """
    den = 1.0 - r * kappa * math.sin(phi)
    if den <= 1e-14:
        raise FocalPointError(
            f"focal point: 1 - r*kappa*sin(phi) = {den:.3e} (kappa={kappa}, phi={phi}, r={r})"
        )
    return kappa * math.cos(phi) / den, kappa * math.sin(phi) / den


def shape_eigen(kappa, phi, r, region="curved"):
    """Principal curvatures (lambda1, lambda2, lambda3) for directions (X1, X2, X3).

    On the curved part: (-1/r, f_s, 0).  On the flat parts the shape operator
    vanishes identically.
    """
    if region.startswith("flat"):
        return 0.0, 0.0, 0.0
    _, f_s = curvature_factors(kappa, phi, r)
    return -1.0 / r, f_s, 0.0


class TubeChart:
    """Chart (s, phi, x3) on the curved part of the tube around P = C x R.

    The embedding into R^4 (coordinates x1, x2, x3, x4) is
    a(s, phi, x3) = gamma(s) + r[sin(phi) e1(s) + cos(phi) e4] + x3 e3,
    with phi in [0, pi]; phi = 0 and pi are the junction circles with the
    flat sheets x4 = +r and x4 = -r.
    """

    def __init__(self, section, wall_index, r):
        if r <= 0:
            raise DomainError(f"ball radius must be positive, got {r}")
        self.section = section
        self.wall_index = wall_index
        self.r = float(r)
        kappa = self.wall.kappa(0.0)
        if kappa > 0 and self.r * kappa >= 1.0:
            raise FocalPointError(
                f"ball radius {self.r} exceeds focal bound 1/kappa = {1.0 / kappa}"
            )

    @property
    def wall(self):
        return self.section.walls[self.wall_index]

    def kappa(self, s):
        return self.wall.kappa(s)

    def embed(self, s, phi, x3=0.0):
        g = self.wall.point(s)
        e1, _ = self.wall.frame(s)
        p = g + self.r * math.sin(phi) * e1
        return np.array([p[0], p[1], x3, self.r * math.cos(phi)])

    def nu(self, s, phi):
        e1, _ = self.wall.frame(s)
        return np.array([math.sin(phi) * e1[0], math.sin(phi) * e1[1], 0.0, math.cos(phi)])

    def frame_fields(self, s, phi):
        """Orthonormal tangent frame (X1, X2, X3) as ambient R^4 vectors."""
        e1, e2 = self.wall.frame(s)
        x1 = np.array([math.cos(phi) * e1[0], math.cos(phi) * e1[1], 0.0, -math.sin(phi)])
        x2 = np.array([e2[0], e2[1], 0.0, 0.0])
        x3 = np.array([0.0, 0.0, 1.0, 0.0])
        return x1, x2, x3

    def coordinate_speeds(self, s, phi, v1, v2, v3):
        """Chart velocities (ds/dt, dphi/dt, dx3/dt) of frame components v."""
        den = 1.0 - self.r * self.kappa(s) * math.sin(phi)
        if den <= 1e-14:
            raise FocalPointError(f"focal point at s={s}, phi={phi}")
        return v2 / den, v1 / self.r, v3

    # -- finite-difference diagnostics ------------------------------------

    def embedding_residuals(self, s, phi, x3=0.0, h=1e-4):
        """|da/ds|-(1 - r k sin phi), |da/dphi|-r, |da/dx3|-1 (central differences)."""
        a = self.embed
        das = (a(s + h, phi, x3) - a(s - h, phi, x3)) / (2 * h)
        dap = (a(s, phi + h, x3) - a(s, phi - h, x3)) / (2 * h)
        dax = (a(s, phi, x3 + h) - a(s, phi, x3 - h)) / (2 * h)
        den = 1.0 - self.r * self.kappa(s) * math.sin(phi)
        return (
            abs(float(np.linalg.norm(das)) - den),
            abs(float(np.linalg.norm(dap)) - self.r),
            abs(float(np.linalg.norm(dax)) - 1.0),
        )

    def frame_check(self, s, phi, x3=0.0, h=1e-4, one_sided=False):
        """Finite-difference residuals of the frame calculus.

        Checks at one chart point:
          * [X1, X2] = f_c X2                (Lie bracket)
          * S X_i = lambda_i X_i via -D_v nu (shape operator)
          * nabla_{X2} X1 = -f_c X2          (covariant derivative)
        Residuals are O(h^2) for central differences, O(h) one-sided.
        ``one_sided`` differentiates in +phi only, for junction points.
        """
        if h <= 0:
            raise DomainError("step h must be positive")
        kappa = self.kappa(s)
        f_c, f_s = curvature_factors(kappa, phi, self.r)
        den = 1.0 - self.r * kappa * math.sin(phi)

        def X1_at(s_, phi_):
            return self.frame_fields(s_, phi_)[0]

        def X2_at(s_, phi_):
            return self.frame_fields(s_, phi_)[1]

        # chart-coordinate central differences scaled by the coordinate
        # speeds: D_{X1} = (1/r) d/dphi, D_{X2} = (1/den) d/ds
        if one_sided:
            dphi_X2 = (X2_at(s, phi + h) - X2_at(s, phi)) / h
            dphi_nu = (self.nu(s, phi + h) - self.nu(s, phi)) / h
        else:
            dphi_X2 = (X2_at(s, phi + h) - X2_at(s, phi - h)) / (2 * h)
            dphi_nu = (self.nu(s, phi + h) - self.nu(s, phi - h)) / (2 * h)
        d1_X2 = dphi_X2 / self.r
        d1_nu = dphi_nu / self.r
        d2_X1 = (X1_at(s + h, phi) - X1_at(s - h, phi)) / (2 * h * den)
        d2_nu = (self.nu(s + h, phi) - self.nu(s - h, phi)) / (2 * h * den)

        X1, X2, _ = self.frame_fields(s, phi)
        bracket = d1_X2 - d2_X1
        res_bracket = float(np.linalg.norm(bracket - f_c * X2))
        res_shape_1 = float(np.linalg.norm(-d1_nu - (-1.0 / self.r) * X1))
        res_shape_2 = float(np.linalg.norm(-d2_nu - f_s * X2))

        nu = self.nu(s, phi)
        cov = d2_X1 - (d2_X1 @ nu) * nu
        res_cov = float(np.linalg.norm(cov + f_c * X2))

        return {
            "bracket": res_bracket,
            "shape_X1": res_shape_1,
            "shape_X2": res_shape_2,
            "nabla_X2_X1": res_cov,
        }


# ---------------------------------------------------------------------------
# Arclength curvature profiles for the 3-dimensional tube systems
# ---------------------------------------------------------------------------


class ArclengthProfile:
    """Piecewise-constant curvature kappa(ell) along a closed curve.

    ``pieces`` is a sequence of (length, kappa); ell wraps modulo the total
    length.  Used by the 3D rolling system whose cross-section is a stadium
    or a circle.
    """

    def __init__(self, pieces):
        self.pieces = tuple((float(a), float(b)) for a, b in pieces)
        self.total_length = sum(p[0] for p in self.pieces)

    def locate(self, ell):
        """Piece index and local coordinate of arclength position ell."""
        ell = ell % self.total_length
        for i, (length, _) in enumerate(self.pieces):
            if ell < length:
                return i, ell
            ell -= length
        return len(self.pieces) - 1, self.pieces[-1][0]

    def kappa(self, ell):
        i, _ = self.locate(ell)
        return self.pieces[i][1]

    def segments(self, ell0, distance):
        """Yield (start, stop, kappa) offsets splitting [0, distance] at kappa breaks."""
        i, local = self.locate(ell0)
        covered = 0.0
        while covered < distance - 1e-15:
            length, kappa = self.pieces[i]
            step = min(length - local, distance - covered)
            yield covered, covered + step, kappa
            covered += step
            local = 0.0
            i = (i + 1) % len(self.pieces)


def stadium_profile(L, r):
    """Stadium curve: two flats of length L joined by half-circles of radius r.

    Cross-section of the tube around a flat strip of width L; arcs carry
    kappa = -1/r.
    """
    if L <= 0 or r <= 0:
        raise DomainError("stadium needs L > 0 and r > 0")
    return ArclengthProfile([(L, 0.0), (math.pi * r, -1.0 / r), (L, 0.0), (math.pi * r, -1.0 / r)])
