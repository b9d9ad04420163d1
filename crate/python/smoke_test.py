"""Smoke test for the pyschurcat extension.

Build and run from the repository root:

    cargo build --release -p schurcat-python --features extension-module
    cp target/release/libpyschurcat.so python/pyschurcat.so
    python3 python/smoke_test.py
"""

import json
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import pyschurcat as sc


def check_scalars():
    q = sc.QScalar("q")
    two = sc.qint(2)
    assert str(two) == str(q + sc.QScalar("q^-1"))
    b = sc.qbinom(4, 2)
    assert b == b.bar()
    assert b.specialize("one") == "6"
    assert (two * two - sc.qint(3)).specialize("one") == "1"
    try:
        sc.QScalar("1") / sc.QScalar("0")
    except ZeroDivisionError:
        pass
    else:
        raise AssertionError("division by zero accepted")


def check_root_data():
    a2 = sc.CartanDatum("A2")
    assert a2.rank == 2
    assert a2.weyl_order() == 6
    assert a2.flag_betti() == [1, 0, 2, 0, 2, 0, 1]
    assert a2.kostant([2, 2]) == 3
    assert len(sc.CartanDatum("G2").positive_roots()) == 6


def check_reports():
    cfg = json.dumps({"type": "A1", "f": "classical", "window": 6, "homcap": 4})
    report = json.loads(sc.run("schur-check", cfg))
    assert report["schema"] == sc.REPORT_SCHEMA
    assert report["result"]["verdict"] == "match"
    assert report["result"]["betti"] == [1, 0, 1, 0, 0]
    assert sc.run_deterministic("schur-check", cfg) == sc.run_deterministic("schur-check", cfg)
    hilb = json.loads(sc.run("hilbert", json.dumps({"type": "A2", "hilbert_cap": 8})))
    assert hilb["result"]["pbw"] == "confirmed"
    try:
        sc.run("ext", json.dumps({"f": "nonsense"}))
    except ValueError as e:
        assert "`f`" in str(e)
    else:
        raise AssertionError("malformed f accepted")


if __name__ == "__main__":
    check_scalars()
    check_root_data()
    check_reports()
    print("pyschurcat", sc.__version__, "smoke test ok")
