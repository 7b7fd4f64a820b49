import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import cons_of_prim, jacobian_eigenvalues, xflux_of_prim
from urhd.core import EosParams, UnphysicalStateError, eigenvalues_array, flux_array, prim_to_cons_array
from urhd.fv import (
    NGHOST,
    Grid,
    SchemeConfig,
    compute_dt,
    evolve,
    fill_ghosts,
    flux_divergence,
    gather_tiles,
    hll_flux,
    hll_flux_array,
    minmod,
    reconstruct,
    rk2_step,
    split_tiles,
    write_snapshot,
)

K = EosParams(1.0 / 3.0)


def periodic_grid(prim_fn, n=64, dims=1):
    lower, upper = (0.0,) * dims, (1.0,) * dims
    grid = Grid.uniform((n,) * dims, lower, upper)
    grid.set_primitive(prim_fn(*grid.mesh()), K.k)
    return grid


def smooth_prim(x, *rest):
    y = rest[0] if rest else 0.0
    rho = 1.0 + 0.5 * np.sin(2 * np.pi * x) * np.cos(2 * np.pi * y)
    vx = 0.3 * np.cos(2 * np.pi * x) + 0 * y
    vy = 0.2 * np.sin(2 * np.pi * (x + y))
    return np.stack([rho, vx, vy, 0.1 + 0 * rho])


# ---------------------------------------------------------------------------
# grid and config


def test_grid_layout():
    g = Grid.uniform((8, 4), (-2.0, 0.0), (2.0, 1.0))
    assert g.u.shape == (4, 12, 8)
    assert g.spacing == (0.5, 0.25)
    np.testing.assert_allclose(g.centers(0), -1.75 + 0.5 * np.arange(8))
    assert g.physical.shape == (4, 8, 4)
    with pytest.raises(ValueError):
        Grid((0,), (1.0,), (0.0,))
    with pytest.raises(ValueError):
        Grid((4,), (-1.0,), (0.0,))


@pytest.mark.parametrize("kwargs", [dict(courant_factor=0.0), dict(courant_factor=1.5),
                                    dict(reconstruction="weno"), dict(boundary=("reflect",))])
def test_scheme_config_validation(kwargs):
    with pytest.raises(ValueError):
        SchemeConfig(K, **kwargs)


# ---------------------------------------------------------------------------
# minmod and reconstruction


@pytest.mark.parametrize("a, b, expected", [(1, 2, 1), (-1, 2, 0), (3, 2, 2), (-3, -2, -2), (0, 5, 0),
                                            (2, 2, 2), (-2, -2, -2)])
def test_minmod_cases(a, b, expected):
    assert minmod(a, b) == expected


@settings(max_examples=200, deadline=None)
@given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6))
def test_minmod_properties(a, b):
    m = float(minmod(a, b))
    assert abs(m) <= min(abs(a), abs(b))
    assert m in (a, b, 0.0)
    assert float(minmod(-a, -b)) == -m


def test_reconstruct_equal_states():
    u = np.repeat(prim_to_cons_array(np.array([2.0, 0.3, 0.1, 0.0]), K.k)[:, None], 6, axis=1)
    u_l, u_r = reconstruct(u, 0.1, K.k)
    np.testing.assert_array_equal(u_l, u[:, 1:-2])
    np.testing.assert_array_equal(u_r, u[:, 2:-1])


def test_reconstruct_extremum_has_zero_slope():
    base = prim_to_cons_array(np.array([2.0, 0.0, 0.0, 0.0]), K.k)
    u = np.repeat(base[:, None], 5, axis=1)
    u[0] += np.array([0.0, 0.0, 0.5, 0.0, 0.0])
    u_l, u_r = reconstruct(u, 1.0, K.k)
    # interface 2+1/2 takes cell 2 from the left: no slope at the peak
    assert u_l[0, 1] == u[0, 2]
    assert u_r[0, 0] == u[0, 2]


def test_reconstruct_linear_profile_is_exact():
    dx = 0.1
    x = dx * np.arange(8)
    u = np.repeat(prim_to_cons_array(np.array([1.0, 0.0, 0.0, 0.0]), K.k)[:, None], 8, axis=1)
    u[0] = 2.0 + 0.3 * x
    u_l, u_r = reconstruct(u, dx, K.k)
    faces = x[1:-2] + 0.5 * dx
    np.testing.assert_allclose(u_l[0], 2.0 + 0.3 * faces, rtol=1e-14)
    np.testing.assert_allclose(u_r[0], 2.0 + 0.3 * faces, rtol=1e-14)


def test_reconstruct_falls_back_when_unphysical():
    # a near-light-speed cell next to a static one: linear extrapolation leaves |S| > E
    prim = np.array([[1.0, 1.0, 1e-3, 1e-3, 1e-3], [0.0, 0.0, 0.999, 0.999, 0.999],
                     [0.0] * 5, [0.0] * 5])
    u = prim_to_cons_array(prim, K.k)
    u_l, u_r = reconstruct(u, 1.0, K.k)
    e, s = u_r[0], np.abs(u_r[1])
    assert np.all(s < e) and np.all(u_l[1] < u_l[0])


# ---------------------------------------------------------------------------
# HLL flux


@settings(max_examples=200, deadline=None)
@given(st.floats(0.01, 100.0), st.floats(-0.99, 0.99), st.floats(0.0, 1.0), st.floats(0.02, 0.98))
def test_hll_consistency_exact(rho, vx, frac, k):
    vy = frac * np.sqrt(1 - vx * vx) * 0.99
    p = np.array([rho, vx, vy, 0.0])
    u = prim_to_cons_array(p, k)
    for axis in range(3):
        np.testing.assert_array_equal(hll_flux_array(u, u, p, p, axis, k), flux_array(u, p, axis, k))


def test_hll_supersonic_upwinds():
    pl, pr = np.array([1.0, 0.9, 0.0, 0.0]), np.array([2.0, 0.85, 0.1, 0.0])
    assert min(eigenvalues_array(pl, 0, K.k)) > 0 and min(eigenvalues_array(pr, 0, K.k)) > 0
    ul, ur = prim_to_cons_array(pl, K.k), prim_to_cons_array(pr, K.k)
    np.testing.assert_array_equal(hll_flux(ul, ur, "x", K), flux_array(ul, pl, 0, K.k))
    # mirrored: everything moves left, the right state is upwind
    ml, mr = pr * [1, -1, 1, 1], pl * [1, -1, 1, 1]
    ul, ur = prim_to_cons_array(ml, K.k), prim_to_cons_array(mr, K.k)
    np.testing.assert_allclose(hll_flux(ul, ur, "x", K), flux_array(ur, mr, 0, K.k), rtol=1e-15)


def test_hll_matches_jacobian_oracle():
    pl, pr = [1.0, 0.5, 1.0 / 3.0, 0.0], [20.0, 0.5, 0.5, 0.0]
    ul, ur = cons_of_prim(pl, K.k), cons_of_prim(pr, K.k)
    lam = np.concatenate([jacobian_eigenvalues(pl, K.k), jacobian_eigenvalues(pr, K.k), [0.0]])
    c_max, c_min = max(lam), -min(lam)
    fl, fr = xflux_of_prim(pl, K.k), xflux_of_prim(pr, K.k)
    expected = (c_max * fl + c_min * fr - c_max * c_min * (ur - ul)) / (c_max + c_min)
    np.testing.assert_allclose(hll_flux(ul, ur, "x", K), expected, rtol=1e-12)


# ---------------------------------------------------------------------------
# time step


def test_compute_dt():
    g = Grid.uniform((3200,), (-2.0,), (2.0,))
    assert compute_dt(g, SchemeConfig(K, 0.1)) == pytest.approx(1.25e-4, rel=1e-15)
    h = 4.0 / 800
    g2 = Grid.uniform((800, 4), (-2.0, 0.0), (2.0, 4 * h))
    assert compute_dt(g2, SchemeConfig(K, 0.1)) == pytest.approx(0.1 * h / 2, rel=1e-15)
    assert compute_dt(g, SchemeConfig(K, 1.0)) == g.spacing[0]


# ---------------------------------------------------------------------------
# ghosts


def test_fill_ghosts_outflow():
    g = Grid.uniform((4,), (0.0,), (1.0,))
    g.physical[...] = np.arange(16.0).reshape(4, 4) + 1
    fill_ghosts(g, SchemeConfig(K, boundary=("outflow",)))
    np.testing.assert_array_equal(g.u[0], [1, 1, 1, 2, 3, 4, 4, 4])


def test_fill_ghosts_periodic_wrap():
    g = Grid.uniform((4,), (0.0,), (1.0,))
    g.physical[0] = [10.0, 11.0, 12.0, 13.0]  # A, B, C, D
    fill_ghosts(g, SchemeConfig(K, boundary=("periodic",)))
    np.testing.assert_array_equal(g.u[0], [12, 13, 10, 11, 12, 13, 10, 11])


@pytest.mark.parametrize("boundary", ["outflow", "periodic"])
def test_tile_ghosts_match_grid_ghosts(boundary):
    cfg = SchemeConfig(K, boundary=(boundary,))
    g = Grid.uniform((9,), (0.0,), (1.0,))
    g.physical[...] = np.arange(36.0).reshape(4, 9) + 1
    tiles = split_tiles(g, 3)
    fill_ghosts(tiles, cfg)
    fill_ghosts(g, cfg)
    for t in tiles:
        np.testing.assert_array_equal(t.u, g.u[:, t.start:t.stop + 2 * NGHOST])


def test_tiles_partition_grid():
    g = Grid.uniform((10, 3), (0.0, 0.0), (1.0, 1.0))
    tiles = split_tiles(g, 4)
    assert [t.start for t in tiles][0] == 0 and tiles[-1].stop == 10
    assert all(a.stop == b.start for a, b in zip(tiles, tiles[1:]))
    assert sum(t.n_cells[0] for t in tiles) == 10


# ---------------------------------------------------------------------------
# stepping


def test_uniform_state_periodic_unchanged():
    g = periodic_grid(lambda x: np.stack([2.0 + 0 * x, 0.4 + 0 * x, -0.3 + 0 * x, 0.1 + 0 * x]))
    start = g.physical.copy()
    cfg = SchemeConfig(K, 0.4, boundary=("periodic",))
    out = evolve(g, cfg, 20 * compute_dt(g, cfg))
    np.testing.assert_allclose(out.physical, start, rtol=1e-15, atol=0)


@pytest.mark.parametrize("dims", [1, 2])
def test_periodic_conservation(dims):
    g = periodic_grid(smooth_prim, n=48 if dims == 1 else 24, dims=dims)
    cfg = SchemeConfig(K, 0.4, boundary=("periodic",) * dims)
    fill_ghosts(g, cfg)
    dt = compute_dt(g, cfg)
    scale = np.abs(g.physical).reshape(4, -1).sum(axis=1)
    total = g.physical.reshape(4, -1).sum(axis=1)
    for _ in range(20):
        rk2_step(g, cfg, dt)
        new = g.physical.reshape(4, -1).sum(axis=1)
        assert np.all(np.abs(new - total) <= 1e-12 * scale)
        total = new


def test_flux_divergence_sums_to_zero_periodic():
    g = periodic_grid(smooth_prim, n=32, dims=2)
    cfg = SchemeConfig(K, boundary=("periodic",))
    fill_ghosts(g, cfg)
    rhs = flux_divergence(g.u, g.spacing, cfg)
    scale = np.abs(rhs).sum(axis=(1, 2))
    assert np.all(np.abs(rhs.sum(axis=(1, 2))) <= 1e-13 * scale)


def test_perturbation_stays_inside_characteristic_cone():
    n, steps = 400, 100
    base = np.array([1.0, 0.3, 0.2, 0.0])
    g = Grid.uniform((n,), (0.0,), (1.0,))
    x = g.centers(0)
    prim = np.repeat(base[:, None], n, axis=1)
    prim[0] += 1e-6 * np.exp(-((x - 0.5) / 0.01) ** 2)
    g.set_primitive(prim, K.k)
    cfg = SchemeConfig(K, 0.4, boundary=("periodic",))
    dt = compute_dt(g, cfg)
    out = evolve(g, cfg, steps * dt)
    t = steps * dt
    dev = np.abs(out.primitive(K.k)[0] - base[0])
    xm, _, xp = (float(v) for v in eigenvalues_array(base, 0, K.k))
    peak = x[np.argmax(dev)]
    assert 0.5 + xm * t - 0.02 <= peak <= 0.5 + xp * t + 0.02
    centroid = np.sum(x * dev) / np.sum(dev)
    assert 0.5 + xm * t <= centroid <= 0.5 + xp * t
    far = (x < 0.5 + xm * t - 0.15) | (x > 0.5 + xp * t + 0.15)
    assert dev[far].max() < 1e-3 * dev.max()


def test_unphysical_state_reports_cell():
    g = Grid.uniform((6,), (0.0,), (1.0,))
    g.set_primitive(np.repeat(np.array([1.0, 0.0, 0.0, 0.0])[:, None], 6, axis=1), K.k)
    g.physical[1, 4] = 5.0  # |S| > E
    with pytest.raises(UnphysicalStateError) as info:
        evolve(g, SchemeConfig(K), 0.01)
    assert info.value.index == (4,)


# ---------------------------------------------------------------------------
# evolve


def riemann_grid(n=200, dims=1, ny=3):
    h = 4.0 / n
    if dims == 1:
        g = Grid.uniform((n,), (-2.0,), (2.0,))
    else:
        g = Grid.uniform((n, ny), (-2.0, 0.0), (2.0, ny * h))
    x = g.mesh()[0]
    left, right = np.array([1.0, 0.5, 1.0 / 3.0, 0.0]), np.array([20.0, 0.5, 0.5, 0.0])
    shape = (4,) + (1,) * dims
    g.set_primitive(np.where(x[None] <= 0, left.reshape(shape), right.reshape(shape)), K.k)
    return g


def test_evolve_zero_time_returns_input():
    g = riemann_grid()
    out = evolve(g, SchemeConfig(K), 0.0)
    np.testing.assert_array_equal(out.physical, g.physical)
    assert out is not g and out.steps == 0


def test_evolve_lands_on_end_time():
    g = riemann_grid(40)
    out = evolve(g, SchemeConfig(K), 0.0333)
    assert out.time == 0.0333
    assert out.steps == int(np.ceil(0.0333 / compute_dt(g, SchemeConfig(K))))
    assert g.time == 0.0 and g.steps == 0


def test_evolve_rejects_negative_time():
    with pytest.raises(ValueError):
        evolve(riemann_grid(20), SchemeConfig(K), -1.0)


@pytest.mark.parametrize("workers", [2, 3, 7])
def test_tile_count_independence_1d(workers):
    g = riemann_grid(200)
    cfg = SchemeConfig(K)
    a = evolve(g, cfg, 0.2)
    b = evolve(g, cfg, 0.2, workers=workers)
    np.testing.assert_array_equal(a.u, b.u)


@pytest.mark.parametrize("tile_axis", [0, 1])
def test_tile_count_independence_2d(tile_axis):
    g = periodic_grid(smooth_prim, n=20, dims=2)
    cfg = SchemeConfig(K, 0.4, boundary=("periodic",))
    a = evolve(g, cfg, 0.05)
    b = evolve(g, cfg, 0.05, workers=3, tile_axis=tile_axis)
    np.testing.assert_array_equal(a.u, b.u)


def test_two_dimensional_y_invariance():
    g = riemann_grid(200, dims=2, ny=4)
    out = evolve(g, SchemeConfig(K, boundary=("outflow", "outflow")), 0.3)
    phys = out.physical
    for j in range(1, 4):
        np.testing.assert_array_equal(phys[:, :, j], phys[:, :, 0])


def test_split_and_gather_roundtrip():
    g = periodic_grid(smooth_prim, n=12, dims=2)
    tiles = split_tiles(g, 5, axis=1)
    h = g.copy()
    h.u[...] = 0.0
    gather_tiles(tiles, h)
    np.testing.assert_array_equal(h.physical, g.physical)


# ---------------------------------------------------------------------------
# snapshot


def test_snapshot_format_1d():
    g = riemann_grid(8)
    buf = io.StringIO()
    write_snapshot(g, K.k, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "x,rho,p,vx,vy,vz"
    assert len(lines) == 9
    first = [float(v) for v in lines[1].split(",")]
    assert first[0] == -1.75
    assert first[1:] == pytest.approx([1.0, 1.0 / 3.0, 0.5, 1.0 / 3.0, 0.0], rel=1e-14)


def test_snapshot_x_fastest_2d():
    g = riemann_grid(4, dims=2, ny=2)
    buf = io.StringIO()
    write_snapshot(g, K.k, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "x,y,rho,p,vx,vy,vz"
    coords = [tuple(float(v) for v in line.split(",")[:2]) for line in lines[1:]]
    assert coords == [(-1.5, 0.5), (-0.5, 0.5), (0.5, 0.5), (1.5, 0.5),
                      (-1.5, 1.5), (-0.5, 1.5), (0.5, 1.5), (1.5, 1.5)]
