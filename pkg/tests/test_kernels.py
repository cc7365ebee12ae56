import numpy as np
import pytest

from loewnerlab import _kernel, drivers, examples, loewner_ode as lo

needs_c = pytest.mark.skipif(_kernel.BACKEND != "cython", reason="compiled kernel not built")
CASES = [drivers.sine(), drivers.sqrt_circle(), drivers.monomial(1.0, 0.5, 2.75),
         drivers.piecewise([drivers.constant(0.0), drivers.linear(3.0)], [0, 0.3, 1.0])]


@needs_c
@pytest.mark.parametrize("d", CASES, ids=lambda d: d.label)
def test_backends_agree_on_tip(d):
    s = 0.9 * d.horizon
    a = lo.solve_tip(d, s, 1e-3, 1e-10, backend="cython")
    b = lo.solve_tip(d, s, 1e-3, 1e-10, backend="python")
    assert a.steps == b.steps
    np.testing.assert_allclose(a.values, b.values, rtol=0, atol=1e-14)


@needs_c
@pytest.mark.parametrize("d", CASES + [examples.example1_driver()], ids=lambda d: d.label)
def test_backends_agree_on_variation(d):
    s = 0.9 * d.horizon
    a = lo.tip_and_variation(d, s, 1e-10, backend="cython")
    b = lo.tip_and_variation(d, s, 1e-10, backend="python")
    # the Marshall tail evaluates its closed form through libm vs Python math,
    # so accepted steps may differ; agreement is then at the tolerance level
    assert abs(a[0] - b[0]) < 1e-11
    assert abs(a[1] - b[1]) < 1e-8 * max(1.0, abs(a[1]))


@needs_c
def test_backends_agree_on_flow():
    d = drivers.sine()
    a = lo.flow(d, 0.2 + 0.5j, 1.0, "forward", backend="cython").value
    b = lo.flow(d, 0.2 + 0.5j, 1.0, "forward", backend="python").value
    assert abs(a - b) < 1e-14


def test_unknown_backend():
    with pytest.raises(ValueError):
        lo.tip_limit(drivers.sine(), 0.5, backend="fortran")


def test_kink_exactly_at_s():
    # s on a kink: the first step must read the left segment
    d = drivers.piecewise([drivers.constant(0.0), drivers.linear(3.0)], [0, 0.3, 1.0])
    for backend in ("python", None):
        f, x, _ = lo.tip_and_variation(d, 0.3, 1e-10, backend=backend)
        assert abs(f - 2j * np.sqrt(0.3)) < 1e-9
        assert abs(x) < 1e-8


def test_env_forces_pure_python():
    import os
    import subprocess
    import sys
    code = ("import loewnerlab, loewnerlab.drivers as D, loewnerlab.loewner_ode as L;"
            "print(loewnerlab.BACKEND, repr(L.tip_limit(D.constant(0.0), 0.25)))")
    env = dict(os.environ, LOEWNERLAB_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True,
                         text=True, check=True).stdout.split()
    assert out[0] == "python"
    assert abs(complex(out[1]) - 1j) < 1e-10
