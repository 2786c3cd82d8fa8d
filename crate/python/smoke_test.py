"""Smoke test for the pyqaxioms extension module.

Build and install first, e.g.

    pip install maturin
    maturin build --release -m crates/python/Cargo.toml -o dist
    pip install dist/pyqaxioms-*.whl

then run `python python/smoke_test.py`.
"""

import math

import pyqaxioms as qx


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    eye = [[1, 0], [0, 1]]
    assert qx.classify(eye)[0] == "Unitary"
    assert qx.classify([[1, 0], [0, 0.5]])[1] == "NON-UNITARY (B′ only)"
    name, _, scale = qx.classify([[2, 0], [0, 2]])
    assert name == "ProportionalUnitary" and close(scale, 2.0, 1e-12)
    assert qx.classify([[1, 0], [0, 0]])[0] == "Singular"

    z = qx.Observable([[1, 0], [0, -1]])
    raw = [3, 4j]
    pa = qx.born_probabilities_a(qx.normalize(raw), z)
    pb = qx.born_probabilities_b(raw, z)
    for (la, a), (lb, b) in zip(pa, pb):
        assert la == lb and close(a, b, 1e-12)
    assert close(dict(pb)[1.0], 9 / 25, 1e-15)

    assert qx.equivalent_b([1, 1j], [2 - 3j, (2 - 3j) * 1j])
    assert qx.canonicalize([0, 2j]) == [0, 1]

    h = 1 / math.sqrt(2)
    hadamard = qx.Operator([[h, h], [h, -h]], "H")
    out = hadamard.evolve_unitary([1, 0])
    assert close(out[0].real, h, 1e-15) and close(out[1].real, h, 1e-15)

    gate = qx.Operator([[1, 0], [0, 0.1]], "gate")
    try:
        gate.evolve_unitary([1, 0])
    except ValueError:
        pass
    else:
        raise AssertionError("non-unitary gate accepted by the unitary engine")
    assert gate.evolve_linear_b([1, 1]) == [1, 0.1]
    assert gate.linearity_defect([1, 0], [0, 1], h, h) > 1e-3

    report = qx.Operator([[1, 0], [0, 0.5]]).theorem_check(n_samples=200, seed=1)
    assert report["verdict"] == "admissible under B′ only"
    assert close(report["witness_deviation"], 0.5, 1e-12)

    try:
        qx.Operator([[1, 0], [0, 0]]).evolve_linear_b([1, 1])
    except qx.SingularOperatorError:
        pass
    else:
        raise AssertionError("singular operator accepted")

    bell = [1, 0, 0, 1]
    rho_b = qx.partial_trace(bell, keep=1, n_qubits=2)
    assert all(close(rho_b[i][j], 0.5 if i == j else 0, 1e-12) for i in range(2) for j in range(2))

    r = qx.run_protocol(epsilon=0.1, bit=0, n_trials=100_000, seed=0)
    p0 = r["analytic_bob_distribution"]["outcomes"][0]["probability"]
    assert close(p0, 1 / 1.01, 1e-14)
    assert sum(r["empirical_counts"]) == 100_000
    assert r == qx.run_protocol(epsilon=0.1, bit=0, n_trials=100_000, seed=0)

    assert qx.no_communication_check(100, 0) <= 1e-10

    rows = qx.error_rate_sweep([0.1, 0.5], n_trials=1000, seed=0)
    assert close(rows[1]["analytic_error"], 0.2, 1e-15)

    print("pyqaxioms smoke test passed")


if __name__ == "__main__":
    main()
