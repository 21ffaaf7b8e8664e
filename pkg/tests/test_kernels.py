from __future__ import annotations

import os
import subprocess
import sys

import numpy as np
import pytest

from qrdensity import _kernels
from qrdensity.arith import sieve_primes

pytestmark = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")

NP = _kernels.NUMPY_KERNELS
NB = _kernels.NUMBA_KERNELS


def test_both_tables_have_same_kernels():
    assert set(NP) == set(NB)


@pytest.mark.parametrize("bound", [2, 3, 10, 97, 10**5])
def test_sieve_equivalent(bound):
    assert np.array_equal(NP["sieve_mask"](bound), NB["sieve_mask"](bound))


@pytest.mark.parametrize("q", [1, 2, 3, 6, 30, 210, 1001])
def test_legendre_equivalent(q):
    primes = sieve_primes(20000).odd()
    assert np.array_equal(NP["legendre_prime"](q, primes), NB["legendre_prime"](q, primes))


@pytest.mark.parametrize("p", [3, 7, 101, 10007])
def test_residue_table_equivalent(p):
    assert np.array_equal(NP["residue_table"](p), NB["residue_table"](p))


@pytest.mark.parametrize("eps", [1, -1])
def test_count_windows_equivalent(eps):
    p = 100003
    table = NP["residue_table"](p)
    a, b, s = (1, 9), (2, 6), 2
    nmax = min((p - 1 - x) // y - (s - 1) for x, y in zip(a, b))
    assert NP["count_windows"](table, a, b, s, nmax, eps) == NB["count_windows"](table, a, b, s, nmax, eps)


def test_parity_count_equivalent():
    rng = np.random.default_rng(0)
    for _ in range(50):
        n = int(rng.integers(1, 10))
        odd = [int(x) for x in rng.integers(1, 1 << n, size=int(rng.integers(0, 4)))]
        even = [int(x) for x in rng.integers(0, 1 << n, size=int(rng.integers(0, 4)))]
        assert NP["parity_count"](odd, even, n) == NB["parity_count"](odd, even, n)


def test_env_flag_selects_numpy_backend():
    code = (
        "from qrdensity import _kernels; from qrdensity.empirical import empirical_density;"
        "from qrdensity.tuples import StandardTuple;"
        "r = empirical_density(StandardTuple((1, 9), (2, 6), 2), 10**5);"
        "print(_kernels.BACKEND, r.pi_plus_count, r.allowable_count)"
    )
    env = dict(os.environ, QRD_DISABLE_NUMBA="1")
    out_np = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    env.pop("QRD_DISABLE_NUMBA")
    out_nb = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out_np.stdout.split()[0] == "numpy"
    assert out_nb.stdout.split()[0] == "numba"
    assert out_np.stdout.split()[1:] == out_nb.stdout.split()[1:]


def test_benchmark_script_runs():
    script = os.path.join(os.path.dirname(__file__), "..", "benchmarks", "bench_kernels.py")
    proc = subprocess.run(
        [sys.executable, script, "--bound", "10000", "--repeat", "1"], capture_output=True, text=True, timeout=300
    )
    assert proc.returncode == 0, proc.stderr
    assert "count_windows" in proc.stdout
