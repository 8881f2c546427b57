import numpy as np
import pytest
from scipy import integrate, stats

from frec.asymptotics import LimitLaw, cdf, pdf, quantile
from frec.core import InvalidArgumentError


@pytest.mark.parametrize("law", list(LimitLaw))
def test_pdf_integrates_to_one(law):
    total, _ = integrate.quad(lambda x: pdf(law, x), 0, np.inf, epsabs=1e-13)
    assert total == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("law", list(LimitLaw))
@pytest.mark.parametrize("x", [0.1, 0.34, 0.59, 1.0, 2.5, 5.0])
def test_cdf_is_integral_of_pdf(law, x):
    area, _ = integrate.quad(lambda t: pdf(law, t), 0, x, epsabs=1e-14, epsrel=1e-13)
    assert abs(area - cdf(law, x)) <= 1e-9


def test_closed_forms_match_scipy():
    x = np.linspace(0, 8, 50)
    np.testing.assert_allclose(cdf("g1", x), stats.halfnorm(scale=np.sqrt(2)).cdf(x), atol=1e-14)
    np.testing.assert_allclose(cdf("g2", x), stats.maxwell.cdf(x), atol=1e-14)
    np.testing.assert_allclose(pdf("g2", x), stats.maxwell.pdf(x), atol=1e-14)


def test_boundary_values():
    for law in LimitLaw:
        assert cdf(law, -1.0) == 0.0
        assert pdf(law, -1.0) == 0.0
        assert cdf(law, 0.0) == 0.0
        assert cdf(law, np.inf) == 1.0
    assert pdf("g1", 0.0) == pytest.approx(1 / np.sqrt(np.pi))


def test_reference_quantiles():
    assert round(quantile("g2", 0.05), 2) == 0.59
    assert round(quantile("g2", 0.01), 2) == 0.34


@pytest.mark.parametrize("law", list(LimitLaw))
@pytest.mark.parametrize("alpha", [1e-6, 0.01, 0.05, 0.5, 0.99])
def test_quantile_inverts_cdf(law, alpha):
    assert cdf(law, quantile(law, alpha)) == pytest.approx(alpha, abs=1e-12)


@pytest.mark.parametrize("alpha", [0.0, 1.0, -0.1, 1.5])
def test_quantile_rejects_bad_alpha(alpha):
    with pytest.raises(InvalidArgumentError):
        quantile("g2", alpha)
