"""Smoke test for the nqac Python extension.

Build and install first:
    pip install maturin
    maturin build --release -m crates/nqac-py/Cargo.toml -o dist
    pip install dist/nqac-*.whl
"""

import math

import nqac


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    p2 = nqac.ModelParams(2, 2, 1.0, 1.5, nesting=2.0)
    assert close(nqac.gamma_c2(p2), 5.0)
    line = nqac.critical_line(nqac.ModelParams(2, 2, 1.0, 1.5), "gamma_of_t", [0.0, 1.0])
    assert close(line[0][0], 5.0) and line[1][0] < 5.0

    warm = p2.replace(gamma=2.0, temperature=0.05)
    sols = nqac.solve_symmetric(warm)
    assert sols and all(s.residual < 1e-8 for s in sols)
    gm = nqac.global_minimum(warm)
    assert gm.stability == "local_min"
    grad = nqac.free_energy_gradient(warm, gm.fractions, gm.ws)
    assert abs(grad[0]) < 1e-8

    report = nqac.classify_transition(nqac.ModelParams(4, 4, 1.0, 1.0, temperature=0.01))
    assert report.order == "first" and abs(report.gamma_c1 - 2.37) < 0.01, report
    c2, c3, c4, c6 = nqac.taylor_coefficients(nqac.ModelParams(4, 2, 1.0, 0.6, gamma=1.7), "analytic")
    n2, _, n4, _ = nqac.taylor_coefficients(nqac.ModelParams(4, 2, 1.0, 0.6, gamma=1.7), "numeric")
    assert close(c2, n2, 1e-6) and close(c4, n4, 1e-6)

    overlap, log_gap = nqac.instanton_overlap(nqac.ModelParams(4, 4, 1.0, 1.0, gamma=2.37), 0.0, 0.99)
    assert 0.0 < overlap < 1.0 and close(log_gap, math.log(overlap))
    theta, w0, w1 = nqac.spinwave_spectrum(1.0, 2.0, 0.4, 1.6)
    assert w1 < 1e-6

    assert nqac.fm_metastable_exists(nqac.ModelParams(2, 2, 1.0, 0.9), 0.1)
    assert not nqac.af_metastable_exists(nqac.ModelParams(2, 2, 1.0, 0.15, coupling="antiferro"), 10, 100)
    occ = nqac.af_occupancy(1.0, 2.0, 1.5, 0.3, 20)
    assert close(sum(occ.probabilities), 1.0)

    j = [[0.0 if a == b else -1.0 for b in range(4)] for a in range(4)]
    inst = nqac.EncodedInstance([0.0] * 4, j, 3, 2.0)
    assert nqac.EncodedInstance.from_triplets(inst.to_triplets()).total_spins == 12
    af = nqac.ModelParams(2, 2, 1.0, 2.0, coupling="antiferro")
    spec = nqac.classical_spectrum(inst, af, codewords=True)
    assert sum(spec.degeneracies) == 16
    small = nqac.EncodedInstance([0.0, 0.0], [[0.0, 1.0], [1.0, 0.0]], 2, 1.0)
    assert nqac.quantum_gap(small, 0.5) > 0.0

    try:
        nqac.ModelParams(2, 2, -1.0)
    except ValueError as e:
        assert "J" in str(e)
    else:
        raise AssertionError("negative J accepted")

    print(f"nqac {nqac.__version__}: python smoke test passed")


if __name__ == "__main__":
    main()
