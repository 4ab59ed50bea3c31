import math
import warnings

import mpmath
import numpy as np
import pytest
import shapely
from numpy.testing import assert_allclose
from scipy.special import hankel1

from cornerscatter.errors import (ConvergenceError, DomainError, ResolutionError,
                                  ResolutionWarning, SolverError)
from cornerscatter.scatter2d import (FarFieldPattern, calibrated_floor, disk_contrast,
                                     disk_oracle, far_field, far_field_at, farfield_constant,
                                     fornberg_weights, herglotz, incident_values,
                                     mode_determinant, optical_theorem_residual, plane_wave,
                                     point_source, polygon_contrast, sample_normal_lines,
                                     sector_contrast, solve, square_vertices, sweep,
                                     transmission_eigenvalues, transmission_residual,
                                     triangle_vertices, with_q0, zero_contrast)
from cornerscatter.scatter2d.contrast import grid_edges
from cornerscatter.scatter2d.io import (read_far_field_csv, read_snapshot, write_far_field_csv,
                                        write_snapshot, write_sweep_csv)
from cornerscatter.scatter2d.scene import load_scene, parse_scene
from cornerscatter.scatter2d.solver import log_cell_integral, required_grid_size

EULER_GAMMA = 0.5772156649015329


@pytest.fixture(scope="module")
def disk_case():
    c = disk_contrast((0, 0), 0.5, 2, 0.6, 256)
    return c, solve(c, 3.0, plane_wave(0.0))


# ------------------------------------------------------------------ incident

def test_incident_examples():
    assert incident_values(plane_wave(0.0), 2.0, 0.0, 0.0) == 1
    v = incident_values(point_source((0.3, -0.2)), 1.0, 1.3, -0.2)
    assert_allclose(v, 0.25j * complex(mpmath.hankel1(0, 1)), rtol=1e-14)
    g = 0.7 - 0.2j
    assert_allclose(incident_values(herglotz(np.full(64, g)), 3.0, 0.0, 0.0), 2 * math.pi * g,
                    rtol=1e-14)


def test_constant_herglotz_is_bessel():
    # int e^{ik x.d} ds(d) = 2 pi J0(k|x|)
    x = np.linspace(-0.5, 0.5, 7)
    v = incident_values(herglotz(np.ones(64)), 4.0, x, 0.3 * x)
    ref = [2 * math.pi * float(mpmath.besselj(0, 4 * math.hypot(a, 0.3 * a))) for a in x]
    assert_allclose(v, ref, atol=1e-12)


def test_incident_errors():
    with pytest.raises(DomainError):
        incident_values(point_source((0, 0)), 1.0, np.array([0.0]), np.array([0.0]))
    with pytest.raises(DomainError):
        incident_values(plane_wave(0.0), 0.0, 0.0, 0.0)
    with pytest.raises(DomainError):
        herglotz([]).kind


# ------------------------------------------------------------------ contrast

def _shapely_fractions(poly, half_width, n):
    e = grid_edges(half_width, n)
    h = e[1] - e[0]
    out = np.zeros((n, n))
    for iy in range(n):
        for ix in range(n):
            out[iy, ix] = poly.intersection(shapely.box(e[ix], e[iy], e[ix + 1], e[iy + 1])).area
    return out / (h * h)


def test_polygon_fractions_match_shapely():
    v = triangle_vertices(0.9) + [0.013, -0.007]
    c = polygon_contrast(v, 2, 0.6, 24)
    ref = _shapely_fractions(shapely.Polygon(v), 0.6, 24)
    assert_allclose(c.fraction, ref, atol=1e-12)
    assert_allclose(c.q, 1 + ref, atol=1e-12)


def test_disk_fractions_match_shapely():
    c = disk_contrast((0.05, -0.02), 0.41, 3, 0.6, 20)
    ref = _shapely_fractions(shapely.Point(0.05, -0.02).buffer(0.41, quad_segs=4096), 0.6, 20)
    assert_allclose(c.fraction, ref, atol=1e-6)


def test_sector_area():
    c = sector_contrast(2 * math.pi / 3, 0.5, 2, 0.6, 64)
    assert_allclose(np.sum(c.fraction) * c.cell_area, math.pi / 3 * 0.25, rtol=1e-5)
    assert c.corner_contrast == 1.0


def test_contrast_invariants():
    c = polygon_contrast(square_vertices(0.5), 2, 0.6, 32)
    assert np.all(c.q[c.fraction == 0] == 1)
    assert c.is_real
    assert with_q0(c, 3).q0 == 3
    with pytest.raises(DomainError):
        disk_contrast((0, 0), 0.5, 2 - 0.1j, 0.6, 16)
    with pytest.raises(DomainError):
        polygon_contrast(square_vertices(1.3), 2, 0.6, 16)
    with pytest.raises(DomainError):
        sector_contrast(2 * math.pi, 0.5, 2, 0.6, 16)


def test_profile_contrast():
    c = disk_contrast((0, 0), 0.5, 2, 0.6, 32, profile="1 + (1 - (r/0.5)**2)")
    assert c.max_index() <= 2 + 1e-12
    with pytest.raises(DomainError):
        disk_contrast((0, 0), 0.5, 2, 0.6, 32, profile="__import__('os')")


# -------------------------------------------------------------------- kernel

@pytest.mark.parametrize("box", [(-0.5, 0.5, -0.5, 0.5), (0.5, 1.5, -0.5, 0.5), (1.0, 2.0, 2.0, 3.0)])
def test_log_cell_integral(box):
    x0, x1, y0, y1 = box
    with mpmath.workdps(25):
        ref = mpmath.quad(lambda x, y: mpmath.log(mpmath.hypot(x, y)),
                          [x0, 0, x1] if x0 < 0 < x1 else [x0, x1],
                          [y0, 0, y1] if y0 < 0 < y1 else [y0, y1])
    assert_allclose(log_cell_integral(x0, x1, y0, y1), float(ref), rtol=1e-12, atol=1e-14)


# -------------------------------------------------------------------- solver

def test_zero_contrast_returns_incident():
    tot = solve(zero_contrast(0.6, 32), 3.0, plane_wave(0.4))
    assert np.array_equal(tot.u, tot.incident)
    assert far_field(tot).norm == 0


def test_linearity_in_incident_field():
    c = polygon_contrast(triangle_vertices(0.8), 2, 0.6, 64)
    a, b = 0.7 - 0.2j, -1.3
    g1, g2 = np.exp(1j * np.arange(64)), np.cos(np.arange(64))
    u1 = solve(c, 4.0, herglotz(g1)).u
    u2 = solve(c, 4.0, herglotz(g2)).u
    u = solve(c, 4.0, herglotz(a * g1 + b * g2)).u
    assert np.max(np.abs(u - a * u1 - b * u2)) <= 1e-8 * np.max(np.abs(u))


def test_square_residual_and_optical_theorem():
    c = polygon_contrast(square_vertices(1.0), 2, 0.6, 128)
    tot = solve(c, 5.0, plane_wave(0.0))
    assert tot.residual <= 1e-8
    pat = far_field(tot)
    assert optical_theorem_residual(pat, far_field_at(tot, [0.0])[0]) <= 1e-5
    assert pat.norm > 1e-2


def test_reciprocity_triangle():
    c = polygon_contrast(triangle_vertices(0.9), 3, 0.6, 96)
    a, b = 0.4, 2.2
    u1 = far_field_at(solve(c, 4.0, plane_wave(a)), [b + math.pi])[0]
    u2 = far_field_at(solve(c, 4.0, plane_wave(b)), [a + math.pi])[0]
    assert abs(u1 - u2) <= 1e-6 * abs(u1)


def test_point_source_inside_is_rejected():
    c = disk_contrast((0, 0), 0.3, 2, 0.6, 32)
    with pytest.raises(DomainError):
        solve(c, 2.0, point_source((0.0, 0.1)))
    tot = solve(c, 2.0, point_source((0.51, 0.05)))
    assert tot.residual <= 1e-8


def test_resolution_guard():
    c = disk_contrast((0, 0), 0.5, 2, 0.6, 16)
    assert required_grid_size(c, 10.0) > 16
    with pytest.warns(ResolutionWarning):
        solve(c, 10.0, plane_wave(0.0))
    with pytest.raises(ResolutionError):
        solve(c, 10.0, plane_wave(0.0), strict_resolution=True)


def test_nonconvergence_is_reported():
    c = disk_contrast((0, 0), 0.5, 4, 0.6, 64)
    with pytest.raises(SolverError, match="history"):
        solve(c, 5.0, plane_wave(0.0), restart=2, maxiter=1)


def test_bad_wavenumber():
    with pytest.raises(DomainError):
        solve(zero_contrast(0.6, 8), -1.0, plane_wave(0.0))


# ----------------------------------------------------------------- far field

def test_farfield_constant():
    # H0(kr) ~ sqrt(2/(pi k r)) e^{i(kr - pi/4)}, so (i/4) H0 has amplitude c e^{ikr}/sqrt(r)
    k, r = 3.0, 4e4
    lhs = 0.25j * hankel1(0, k * r) * math.sqrt(r) * np.exp(-1j * k * r)
    assert_allclose(lhs, farfield_constant(k), rtol=1e-5)


def test_pattern_needs_enough_samples():
    with pytest.raises(DomainError):
        FarFieldPattern.from_values(1.0, np.zeros(63))
    with pytest.raises(DomainError):
        far_field(solve(zero_contrast(0.6, 8), 1.0, plane_wave(0.0)), 32)


def test_disk_far_field_against_oracle(disk_case):
    _, tot = disk_case
    ref = disk_oracle(0.5, 2, 3, 0.0).far_field()
    assert far_field(tot).relative_error(ref) <= 1e-3


def test_disk_near_field_against_oracle(disk_case):
    c, tot = disk_case
    X, Y = np.meshgrid(c.centers, c.centers, indexing="xy")
    ref = disk_oracle(0.5, 2, 3, 0.0).total_field(X, Y)
    # cells cut by the circle carry the first-order rasterization error
    clean = (c.fraction == 0) | (c.fraction == 1)
    assert np.linalg.norm((tot.u - ref)[clean]) / np.linalg.norm(ref[clean]) <= 1e-2


# -------------------------------------------------------------------- oracle

def test_oracle_vanishes_as_q0_tends_to_one():
    sizes = [max(abs(a) for a in disk_oracle(0.5, 1 + eps, 3, 0.0).scattering.values())
             for eps in (1e-2, 1e-4, 1e-6)]
    assert sizes[1] < 1e-2 * sizes[0] * 1.5 and sizes[2] < 1e-2 * sizes[1] * 1.5
    assert sizes[2] < 1e-5


def test_long_wavelength_monopole():
    R, k, q = 0.05, 2.0, 2.0
    x = k * R
    L = math.log(x / 2) + EULER_GAMMA
    lead = 1j * math.pi * x * x * (q - 1) / 4
    two = lead * (1 - x * x * (1 + q) / 8
                  - (1j * math.pi * x * x / 2) * (1 - q) * (0.5 + 1j * (L - 0.5) / math.pi))
    o = disk_oracle(R, q, k, 0.0)
    a0 = o.scattering[0]
    assert abs(a0 - two) <= 1e-3 * abs(a0)
    assert abs(a0 - two) <= abs(a0 - lead) / 20
    assert all(abs(o.scattering[n]) < abs(a0) for n in o.scattering if n != 0)


def _mp_mode(n, R, q0, k):
    R, q0, k = mpmath.mpf(R), mpmath.mpf(q0), mpmath.mpf(k)
    ka = k * mpmath.sqrt(q0)
    J, H = (lambda x: mpmath.besselj(n, x)), (lambda x: mpmath.hankel1(n, x))
    dJ = lambda x: mpmath.besselj(n, x, 1)  # noqa: E731
    dH = lambda x: mpmath.diff(H, x)  # noqa: E731
    den = k * dH(k * R) * J(ka * R) - ka * dJ(ka * R) * H(k * R)
    return complex(1j ** n * (ka * dJ(ka * R) * J(k * R) - k * dJ(k * R) * J(ka * R)) / den)


@pytest.mark.parametrize("R,q0,k", [(0.4, 3.0, 2.0), (0.3, 0.5, 6.0)])
def test_oracle_against_mpmath_mode_matching(R, q0, k):
    o = disk_oracle(R, q0, k, 0.0)
    with mpmath.workdps(30):
        for n in range(-4, 5):
            assert_allclose(o.scattering[n], _mp_mode(n, R, q0, k), rtol=1e-11, atol=1e-16)


# mode-matching coefficients a_n for R = 0.5, q0 = 2, k = 3, d = (1, 0), from a 30-digit run
PINNED = {0: -0.43342984239653504 + 0.49554859914709661j,
          1: -0.42113606145832642 - 0.23047371605097822j,
          2: 0.0019015794043209361 - 0.043565621768660648j,
          3: 0.001914596474695055 + 3.6656930982206227e-6j}


def test_oracle_regression_table():
    o = disk_oracle(0.5, 2, 3, 0.0)
    for n, ref in PINNED.items():
        assert_allclose(o.scattering[n], ref, rtol=1e-12)
        # J_{-n} = (-1)^n J_n and b_{-n} = (-1)^n b_n for d = (1, 0)
        assert_allclose(o.scattering[-n], (-1) ** n * ref, rtol=1e-12)


def test_oracle_rejects_bad_input():
    with pytest.raises(DomainError):
        disk_oracle(0.5, -1, 3, 0.0)
    with pytest.raises(DomainError):
        disk_oracle(0.5, 2, 3, point_source((1, 1)))


def test_singular_mode_is_reported():
    # q0 tiny enough that the interior wavenumber vanishes in double precision
    with pytest.raises((ConvergenceError, DomainError)):
        disk_oracle(0.5, 1e-300, 3, 0.0)


def test_transmission_eigenvalue():
    roots = transmission_eigenvalues(0, 0.5, 4, 6.0, 7.5)
    assert_allclose(roots[0], 6.7683896790803475, rtol=1e-12)
    assert abs(mode_determinant(0, 0.5, 4, roots[0])) <= 1e-12
    # the constant Herglotz field only excites n = 0, which is silent there
    o = disk_oracle(0.5, 4, roots[0], herglotz(np.ones(64)))
    assert max(abs(a) for a in o.scattering.values()) <= 1e-10


# --------------------------------------------------------------------- sweep

def test_zero_contrast_sweep():
    t = sweep(zero_contrast(0.6, 32), plane_wave(0.0), (1, 3), 4)
    assert np.all(t.norms == 0)
    assert t.flagged == list(t.ks)
    assert not t.failed


def test_sweep_records_failures():
    c = disk_contrast((0, 0), 0.5, 2, 0.6, 32)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ResolutionWarning)
        t = sweep(c, plane_wave(0.0), (20, 21), 2, floor=0.0, strict_resolution=True)
    assert t.failed == [20.0, 21.0]
    assert "resolution" in t.entries[0].message


def test_calibrated_floor_of_disk_is_oracle_error():
    c = disk_contrast((0, 0), 0.5, 2, 0.6, 64)
    f = calibrated_floor(c, plane_wave(0.0), 3.0)
    ref = disk_oracle(0.5, 2, 3, 0.0).far_field(128)
    num = far_field(solve(c, 3.0, plane_wave(0.0)), 128)
    assert_allclose(f, num.distance(ref), rtol=1e-3)
    assert 0 < f < 1e-2 * ref.norm


def test_disk_dips_at_transmission_eigenvalue():
    kk = 6.7683896790803475
    g = herglotz(np.ones(64))
    disk = disk_contrast((0, 0), 0.5, 4, 0.6, 128)
    square = polygon_contrast(square_vertices(math.sqrt(math.pi) * 0.5), 4, 0.6, 128)
    nd = far_field(solve(disk, kk, g), 128).norm
    ns = far_field(solve(square, kk, g), 128).norm
    assert nd < 1e-2 * ns


# -------------------------------------------------------------- transmission

def test_fornberg_weights_examples():
    w = fornberg_weights(0.0, [-1, 0, 1], 2)
    assert_allclose(w, [[0, 1, 0], [-0.5, 0, 0.5], [1, -2, 1]], atol=1e-15)
    w = fornberg_weights(0.0, [0, 1, 2], 1)
    assert_allclose(w[1], [-1.5, 2, -0.5], atol=1e-15)


def test_same_function_on_both_sides_gives_zero():
    # a quintic is reproduced exactly by the six-point one-sided stencils
    f = lambda x, y: 1 + x + 2 * y - y ** 2 + 0.5 * y ** 3 - 0.2 * y ** 5  # noqa: E731
    pts = np.stack([np.linspace(-1, 1, 9), np.zeros(9)], axis=1)
    nrm = np.tile([0.0, 1.0], (9, 1))
    outer = sample_normal_lines(f, pts, nrm, 0.1, 6, side=1)
    inner = sample_normal_lines(f, pts, nrm, 0.1, 6, side=-1)
    res = transmission_residual(outer, inner, 0.1, orders=(0, 1, 2, 3))
    assert all(v <= 1e-9 for v in res.values())
    flat = np.ones((4, 6))
    res = transmission_residual(flat, flat, 0.1, orders=(0, 1, 2))
    assert res[0] == 0 and max(res.values()) <= 1e-12


def _flat_lines(u_outer, u_inner, h=1e-3):
    pts = np.stack([np.linspace(-1, 1, 21), np.zeros(21)], axis=1)
    nrm = np.tile([0.0, 1.0], (21, 1))
    return (sample_normal_lines(u_outer, pts, nrm, h, 6, side=1),
            sample_normal_lines(u_inner, pts, nrm, h, 6, side=-1), h)


def _flat_pair(k, q0):
    u1 = lambda x, y: np.exp(-1j * k * y) + (1 - q0) / (1 + q0) * np.exp(1j * k * y)  # noqa: E731
    u2 = lambda x, y: 2 / (1 + q0) * np.exp(-1j * k * q0 * y)  # noqa: E731
    return u1, u2


def test_flat_interface_pair():
    res = transmission_residual(*_flat_lines(*_flat_pair(2.0, 3.0)), orders=(0, 1))
    assert res[0] <= 1e-6 and res[1] <= 1e-6


def test_perturbation_shows_at_order_two():
    _, u2 = _flat_pair(2.0, 3.0)
    bumped = lambda x, y: u2(x, y) + 1e-3 * y * y  # noqa: E731
    res = transmission_residual(*_flat_lines(u2, bumped), orders=(0, 1, 2))
    assert res[0] <= 1e-12 and res[1] <= 1e-8
    assert_allclose(res[2], 2e-3, rtol=1e-3)


def test_order_beyond_stencil():
    s = np.zeros((2, 3))
    with pytest.raises(DomainError):
        transmission_residual(s, s, 0.1, orders=(3,))


# ------------------------------------------------------------------------ io

def test_snapshot_round_trip(tmp_path):
    v = np.arange(12).reshape(3, 4) * (1 - 0.5j)
    write_snapshot(tmp_path / "f.bin", v, (-1, 1, -2, 2), 3.5)
    raw = (tmp_path / "f.bin").read_bytes()
    assert raw[:8] == b"CSFIELD\0" and len(raw) == 60 + 16 * 12
    snap = read_snapshot(tmp_path / "f.bin")
    assert np.array_equal(snap.values, v) and snap.bbox == (-1, 1, -2, 2) and snap.k == 3.5


def test_snapshot_bad_magic(tmp_path):
    (tmp_path / "x.bin").write_bytes(b"NOTFIELD" + bytes(80))
    with pytest.raises(DomainError):
        read_snapshot(tmp_path / "x.bin")
    (tmp_path / "y.bin").write_bytes(b"CSF")
    with pytest.raises(DomainError):
        read_snapshot(tmp_path / "y.bin")


def test_far_field_csv_round_trip(tmp_path):
    pat = FarFieldPattern.from_values(2.0, np.exp(1j * np.arange(64)) / 3)
    write_far_field_csv(tmp_path / "ff.csv", pat)
    back = read_far_field_csv(tmp_path / "ff.csv", 2.0)
    assert np.array_equal(back.values, pat.values)


def test_sweep_csv(tmp_path):
    t = sweep(zero_contrast(0.6, 16), plane_wave(0.0), (1, 2), 3)
    write_sweep_csv(tmp_path / "s.csv", {"a": t, "b": t})
    lines = (tmp_path / "s.csv").read_text().splitlines()
    assert lines[0].startswith("k,norm_a,") and "flag_b" in lines[0]
    assert len(lines) == 4
    u = sweep(zero_contrast(0.6, 16), plane_wave(0.0), (1, 3), 3)
    with pytest.raises(DomainError):
        write_sweep_csv(tmp_path / "t.csv", {"a": t, "b": u})


# --------------------------------------------------------------------- scene

def test_bundled_scenes(scene_dir):
    sq = load_scene(scene_dir / "square.scene")
    assert sq.k == 5 and sq.k_range == (1, 10) and sq.steps == 50
    assert sq.contrast().shape["kind"] == "polygon"
    demo = load_scene(scene_dir / "square_vs_disk.scene")
    assert [s.name for s in demo.shapes] == ["square", "disk"]
    assert demo.incident.kind == "herglotz" and demo.incident.density.size == 64
    area = np.sum(demo.contrast("square").fraction) * demo.contrast("square").cell_area
    assert_allclose(area, math.pi * 0.25, rtol=1e-12)


@pytest.mark.parametrize("text", [
    "no sections here",
    "[shape a]\nkind = none\n",
    "[scene]\nn = 16\n",
    "[scene]\nn = sixteen\n[shape a]\nkind = none\n",
    "[scene]\nincident = laser\n[shape a]\nkind = none\n",
    "[scene]\nincident = herglotz\ndensity = 1; 2\ndensity_samples = 64\n[shape a]\nkind = none\n",
])
def test_scene_errors(text):
    with pytest.raises(DomainError):
        parse_scene(text)


def test_scene_shape_selection():
    sc = parse_scene("[scene]\nn = 16\ndirection = pi/2\n[shape a]\nkind = none\n"
                     "[shape b]\nkind = sector\nomega = 2*pi/3\nradius = 0.4\n")
    assert_allclose(sc.incident.direction, (0, 1), atol=1e-16)
    with pytest.raises(DomainError):
        sc.shape()
    assert sc.contrast("b").shape["kind"] == "sector"
    with pytest.raises(DomainError):
        sc.contrast("c")
    with pytest.raises(DomainError):
        parse_scene("[scene]\n[shape a]\nkind = blob\n").contrast()


def test_missing_scene_file(tmp_path):
    with pytest.raises(DomainError):
        load_scene(tmp_path / "nope.scene")
