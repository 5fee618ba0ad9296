import dataclasses

import pytest

from orbitforms.harness import (
    TOLERANCES,
    CampaignConfig,
    VerificationReport,
    default_checks,
    run_suite,
)


def strip_timing(reports):
    return [dataclasses.replace(r, elapsed_s=0.0) for r in reports]


def test_default_campaign_toda_aks_all_checks_pass():
    config = CampaignConfig(model="toda-aks", size=2, seed=0, samples=25)
    reports = run_suite(config)
    assert [r.check for r in reports] == list(default_checks("toda-aks"))
    assert len(reports) == 10
    for r in reports:
        assert r.passed, f"{r.check}: {r.max_residual} > {r.tolerance}"
        assert r.passed == (r.max_residual <= r.tolerance)


def test_cartan_and_gaudin_campaigns_pass():
    for model, size in (("toda-cartan", 2), ("gaudin", 3)):
        config = CampaignConfig(model=model, size=size, seed=1, samples=10)
        for r in run_suite(config):
            assert r.passed, f"{model}/{r.check}: {r.max_residual}"


def test_empty_check_list_gives_empty_report():
    config = CampaignConfig(model="toda-aks", checks=())
    assert run_suite(config) == []


def test_determinism_and_order_independence():
    config = CampaignConfig(model="toda-aks", size=2, seed=7, samples=10)
    first = strip_timing(run_suite(config))
    second = strip_timing(run_suite(config))
    assert first == second
    subset = ("involution", "mcybe")
    reordered = CampaignConfig(model="toda-aks", size=2, seed=7, samples=10, checks=subset)
    partial = {r.check: r for r in strip_timing(run_suite(reordered))}
    full = {r.check: r for r in first}
    for name in subset:
        assert partial[name] == full[name]


def test_config_validation():
    with pytest.raises(ValueError):
        CampaignConfig(model="toda-open")
    with pytest.raises(ValueError):
        CampaignConfig(model="toda-aks", checks=("spectral-gap",))
    with pytest.raises(ValueError):
        CampaignConfig(model="gaudin", checks=("mcybe",))  # not applicable
    with pytest.raises(ValueError):
        CampaignConfig(model="toda-aks", size=0)
    with pytest.raises(ValueError):
        CampaignConfig(model="gaudin", size=3, matrix_dim=9)
    with pytest.raises(ValueError):
        CampaignConfig(model="toda-aks", samples=0)


def test_report_round_trip():
    report = VerificationReport(
        model="toda-aks",
        check="mcybe",
        samples=100,
        max_residual=3.2e-15,
        tolerance=1e-12,
        passed=True,
        seed=42,
        elapsed_s=0.01,
    )
    assert VerificationReport.from_dict(report.to_dict()) == report


def test_tolerance_scale_forces_failures():
    config = CampaignConfig(
        model="toda-aks", size=2, seed=0, samples=5,
        checks=("mcybe", "involution"), tolerance_scale=1e-30,
    )
    reports = run_suite(config)
    assert all(not r.passed for r in reports)


def test_tolerance_table_is_complete():
    for model in ("toda-aks", "toda-cartan", "gaudin"):
        for check in default_checks(model):
            assert check in TOLERANCES
