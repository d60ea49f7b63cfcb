"""Smoke test for the qst_chain extension module.

Build and install first, for example:
    maturin develop -m crates/py/Cargo.toml
then run:
    python python/smoke_test.py
"""

import math

import qst_chain


def main() -> None:
    fields = qst_chain.build_fields(8, 0.5, 2.0)
    assert fields == fields[::-1] and len(fields) == 8

    flat = qst_chain.Chain.power_law(8, 0.0, 0.0)
    drop = flat.decompose().qst_drop()
    assert abs(drop - (math.sqrt(2 / 9) * math.sin(4 * math.pi / 9) - 1 / math.sqrt(2))) < 1e-8

    chain = qst_chain.Chain.power_law(8, 0.5, 2.0)
    spectrum = chain.decompose()
    assert len(spectrum) == 8 and spectrum.values == sorted(spectrum.values)
    assert set(spectrum.parity) <= {"even", "odd"}

    times, pops = spectrum.evolve([0.0, 1.0, 2.0])
    assert all(abs(sum(row) - 1.0) < 1e-10 for row in pops)

    report = qst_chain.transfer_report(chain)
    assert report["p_max"] >= 0.9, report
    assert report["t_est"] > 0 and report["t_threshold"] > 0

    dimer = qst_chain.Chain([1.0], [0.0, 0.0]).decompose().dimer_modes()
    assert abs(qst_chain.t_star_estimate(dimer["e_plus"], dimer["e_minus"]) - math.pi / 4) < 1e-12

    assert abs(qst_chain.p_threshold(8, 1.0, 1.0, 2) - 1.0) < 1e-8
    assert abs(qst_chain.experimental_ratio() - 0.086) < 1e-3

    try:
        qst_chain.build_fields(0, 0.5, 2.0)
    except ValueError:
        pass
    else:
        raise AssertionError("n_sites = 0 must raise ValueError")

    print("qst_chain smoke test passed")


if __name__ == "__main__":
    main()
