import numpy as np
import pytest
from scipy.integrate import solve_ivp

from hodgeflow.complex import build_complex, flip_orientation, with_weights
from hodgeflow.dynamics import (
    Trajectory,
    apply_rotating_frame,
    consensus_coupling,
    frustration,
    grad_curl_coupling,
    integrate,
    integrate_coupling,
    random_initial_condition,
    rhs_consensus,
    rhs_decomposed,
    rhs_diffusion,
    up_term,
)
from hodgeflow.errors import DimensionError, HarmonicError, IntegrationError
from hodgeflow.generators import preset_holed, preset_triangle, preset_two_triangles
from hodgeflow.hodge import harmonic_cochain, hodge_bases

from oracles import node_kuramoto, random_graph


@pytest.mark.parametrize("a1,a2,theta", [(0.3, 0.7, 0.4), (1.2, -0.5, 2.0), (0.0, 0.0, -1.0)])
def test_triangle_scalar_reduction(a1, a2, theta):
    c = preset_triangle()
    out = rhs_consensus(c, 1, frustration(c, 1, a1, a2), np.full(3, theta))
    assert np.allclose(out, -a1 - np.sin(3 * theta + a2), atol=1e-14)


def test_flipped_triangle_reduction():
    # theta_1 on edges (0,1) and (1,2), theta_2 on the reversed edge (0,2)
    c = preset_triangle(flipped=True)
    idx = c.index(1)
    a1, a2 = 0.3, 0.9
    rng = np.random.default_rng(3)
    for t1, t2 in rng.uniform(-3, 3, size=(10, 2)):
        theta = np.zeros(3)
        theta[[idx[(0, 1)], idx[(1, 2)]]] = t1
        theta[idx[(0, 2)]] = t2
        out = rhs_consensus(c, 1, frustration(c, 1, a1, a2), theta)
        assert out[idx[(0, 1)]] == pytest.approx(out[idx[(1, 2)]], abs=1e-14)
        d1 = -a1 - np.sin(t1 + t2) - np.sin(2 * t1 - t2 + a2)
        d2 = -a1 - 2 * np.sin(t1 + t2) - np.sin(-2 * t1 + t2 + a2)
        assert out[idx[(0, 1)]] == pytest.approx(d1, abs=1e-13)
        assert out[idx[(0, 2)]] == pytest.approx(d2, abs=1e-13)


def test_node_level_matches_adjacency_form():
    rng = np.random.default_rng(11)
    for _ in range(10):
        n = int(rng.integers(3, 9))
        A = random_graph(rng, n)
        edges = [(i, j) for i in range(n) for j in range(i + 1, n) if A[i, j]]
        c = build_complex({0: [(v,) for v in range(n)], 1: edges})
        omega = rng.normal(size=n)
        alpha = float(rng.uniform(-1.5, 1.5))
        theta = rng.uniform(0, 2 * np.pi, n)
        out = rhs_consensus(c, 0, frustration(c, 0, -omega, alpha), theta)
        assert np.abs(out - node_kuramoto(A, omega, alpha, theta)).max() < 1e-12


def test_node_level_independent_of_edge_orientation():
    c = build_complex([(0, 1), (1, 2), (0, 2), (2, 3)])
    theta = np.array([0.1, 1.0, -0.7, 2.2])
    fr = frustration(c, 0, 0.2, 0.6)
    base = rhs_consensus(c, 0, fr, theta)
    for i in range(c.n(1)):
        flipped = flip_orientation(c, 1, i)
        assert np.abs(rhs_consensus(flipped, 0, frustration(flipped, 0, 0.2, 0.6), theta) - base).max() < 1e-12


def test_face_flip_invariance(presets):
    rng = np.random.default_rng(5)
    for c in presets.values():
        if c.max_order < 2:
            continue
        theta = rng.uniform(-np.pi, np.pi, c.n(1))
        fr = frustration(c, 1, rng.normal(size=c.n(1)), 0.8)
        base = rhs_consensus(c, 1, fr, theta)
        for f in range(c.n(2)):
            other = flip_orientation(c, 2, f)
            out = rhs_consensus(other, 1, frustration(other, 1, np.asarray(fr.alpha_k), 0.8), theta)
            assert np.abs(out - base).max() < 1e-12


def test_edge_flip_changes_frustrated_rhs():
    c = preset_holed()
    theta = np.random.default_rng(0).uniform(-1, 1, c.n(1))
    a = rhs_consensus(c, 1, frustration(c, 1, 0.0, 0.5), theta)
    other = preset_holed({"blue"})
    b = rhs_consensus(other, 1, frustration(other, 1, 0.0, 0.5), theta)
    assert np.abs(a - b).max() > 1e-3


def test_harmonic_shift_invariance():
    c = preset_holed()
    h = np.asarray(harmonic_cochain(c, 1, [1.0]))
    rng = np.random.default_rng(2)
    fr = frustration(c, 1, 0.1, 0.7)
    for _ in range(10):
        theta = rng.uniform(-np.pi, np.pi, c.n(1))
        shift = rng.uniform(-10, 10)
        diff = rhs_consensus(c, 1, fr, theta + shift * h) - rhs_consensus(c, 1, fr, theta)
        assert np.abs(diff).max() < 1e-12


def test_frustrated_coupling_leaks_into_grad():
    c = preset_holed()
    b = hodge_bases(c, 1)
    theta = np.random.default_rng(1).uniform(-np.pi, np.pi, c.n(1))
    assert np.linalg.norm(grad_curl_coupling(c, b, 0.0, theta)) < 1e-12
    for variant in (set(), {"blue"}, {"blue", "red"}):
        v = preset_holed(variant)
        assert np.linalg.norm(grad_curl_coupling(v, hodge_bases(v, 1), 0.6, theta)) > 1e-3


def test_decomposed_parts_sum_to_rhs():
    c = preset_holed({"blue"})
    b = hodge_bases(c, 1)
    rng = np.random.default_rng(4)
    fr = frustration(c, 1, rng.normal(size=c.n(1)), 0.4)
    theta = rng.uniform(-np.pi, np.pi, c.n(1))
    parts = rhs_decomposed(c, b, fr, theta)
    assert np.abs(sum(parts) - rhs_consensus(c, 1, fr, theta)).max() < 1e-12
    with pytest.raises(DimensionError):
        rhs_decomposed(c, hodge_bases(c, 0), frustration(c, 0), np.zeros(c.n(0)))


def test_diffusion_equals_consensus_for_unit_weights():
    c = preset_triangle()
    rng = np.random.default_rng(8)
    fr = frustration(c, 1, 0.3, 0.5)
    for _ in range(5):
        theta = rng.uniform(-np.pi, np.pi, 3)
        assert np.abs(rhs_diffusion(c, 1, fr, theta) - rhs_consensus(c, 1, fr, theta)).max() < 1e-14


def test_diffusion_differs_with_weights():
    c = with_weights(preset_holed(), 1, np.linspace(0.5, 2.0, 15))
    theta = np.random.default_rng(0).uniform(-1, 1, c.n(1))
    fr = frustration(c, 1)
    assert np.abs(rhs_diffusion(c, 1, fr, theta) - rhs_consensus(c, 1, fr, theta)).max() > 1e-3


def test_up_term_top_order():
    c = preset_triangle()
    fr = frustration(c, 2, 0.5, 0.0)
    assert np.allclose(rhs_consensus(c, 2, fr, [0.0]), -0.5 - 0.0)
    with pytest.raises(DimensionError):
        frustration(c, 2, 0.0, [1.0, 2.0])


def test_up_term_matches_coupling():
    c = preset_two_triangles(0.5)
    theta = np.array([0.1, -0.4, 0.9, 0.3, 1.1])
    full = rhs_consensus(c, 1, frustration(c, 1, 0.0, 0.3), theta)
    # the same edges without the face leave only the down term
    no_face = preset_two_triangles(0.0)
    down = rhs_consensus(no_face, 1, frustration(no_face, 1), theta)
    assert np.allclose(full - down, -up_term(c, 1, 0.3, theta))


def test_batched_coupling_matches_columns():
    c = preset_holed()
    f = consensus_coupling(c, 1, frustration(c, 1, 0.2, 0.5))
    X = np.random.default_rng(0).normal(size=(c.n(1), 4))
    batched = f(X)
    for j in range(4):
        assert np.allclose(batched[:, j], f(X[:, j]))


def test_rk4_against_adaptive_solver():
    c = preset_holed({"blue"})
    f = consensus_coupling(c, 1, frustration(c, 1, 0.1, 0.9))
    theta0 = random_initial_condition(c, 1, 3)
    times, phases = integrate_coupling(f, theta0, t_max=20.0, dt=0.005, sample_every=100)
    ref = solve_ivp(lambda t, y: f(y), (0, 20.0), theta0, t_eval=times, method="DOP853", rtol=1e-12, atol=1e-12)
    assert np.abs(ref.y.T - phases).max() < 1e-8


def test_rk4_fourth_order():
    c = preset_triangle(True)
    f = consensus_coupling(c, 1, frustration(c, 1, 0.4, 0.7))
    theta0 = random_initial_condition(c, 1, 0)
    ref = solve_ivp(lambda t, y: f(y), (0, 5.0), theta0, method="DOP853", rtol=1e-13, atol=1e-13).y[:, -1]
    errs = [np.abs(integrate_coupling(f, theta0, 5.0, dt, int(round(5.0 / dt)))[1][-1] - ref).max() for dt in (0.1, 0.05)]
    assert 12 < errs[0] / errs[1] < 20


def test_integration_error_reports_time():
    c = preset_triangle()
    f = consensus_coupling(c, 1, frustration(c, 1, 0.0, 0.0))
    with pytest.raises(IntegrationError):
        integrate_coupling(f, [np.nan, 0.0, 0.0], 1.0)
    f_bad = consensus_coupling(c, 1, frustration(c, 1, [np.inf, 0.0, 0.0], 0.0))
    with pytest.raises(IntegrationError) as info:
        integrate_coupling(f_bad, [0.0, 0.0, 0.0], 1.0)
    assert info.value.time >= 0


def test_trajectory_shape_and_config():
    c = preset_holed()
    traj = integrate(c, 1, frustration(c, 1, 0.0, 0.1), random_initial_condition(c, 1, 0), t_max=10.0, seed=0)
    assert traj.phases.shape == (101, c.n(1))
    assert np.all(np.diff(traj.times) > 0)
    assert traj.config["complex_id"] == c.fingerprint and traj.config["seed"] == 0
    assert traj.sample_step == pytest.approx(0.1)
    assert len(traj.window(0.5).times) == 51


def test_trajectory_csv_roundtrip(tmp_path):
    c = preset_triangle()
    traj = integrate(c, 1, frustration(c, 1, 0.2, 0.1), random_initial_condition(c, 1, 1), t_max=2.0)
    path = tmp_path / "traj.csv"
    traj.to_csv(path)
    back = Trajectory.from_csv(path)
    assert np.array_equal(back.times, traj.times)
    assert np.array_equal(back.phases, traj.phases)
    assert back.config == traj.config


def test_rotating_frame():
    c = preset_holed()
    h = np.asarray(harmonic_cochain(c, 1, [1.0]))
    fr = frustration(c, 1, 0.5 * h, 0.0)
    traj = integrate(c, 1, fr, 2.0 * h, t_max=5.0)
    # harmonic frustration only rotates along h at rate -0.5 * |h|^2 = -0.5
    still = apply_rotating_frame(traj, c, h, -0.5)
    assert np.abs(still.phases - 2.0 * h).max() < 1e-10
    with pytest.raises(HarmonicError):
        apply_rotating_frame(traj, c, np.ones(c.n(1)), 1.0)


def test_wrong_theta_length():
    c = preset_triangle()
    with pytest.raises(DimensionError):
        rhs_consensus(c, 1, frustration(c, 1), np.zeros(4))
