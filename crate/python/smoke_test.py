"""Smoke test for the `derham` extension module.

Build and install with `maturin develop -m crates/py/Cargo.toml`, or copy
`target/release/libderham.so` to `derham.so` somewhere on `sys.path`.
"""
import json

import derham


def main():
    z2 = derham.ChainComplex.concentrated("Z", 2, 1)
    assert derham.derived_power("sym", 2, z2).homology() == {4: "Z"}
    assert derham.derived_power("sym", 2, derham.ChainComplex.concentrated("Z", 1, 1)).homology() == {}

    fp = derham.AlgebraPresentation.preset("Fp-over-Z", 3)
    inf = fp.stub("inf", 3)
    assert inf.N == 3
    assert [inf.gr(s).homology() for s in range(3)] == [{0: "Z/3"}] * 3
    assert inf.level(0).homology() == {0: "Z/27"}

    hyp = derham.AlgebraPresentation("Z", ["x"], ["x^2"], "regseq")
    assert hyp.kahler() == "<dx>/(2*x*dx)"

    circle = derham.filtered_circle(4)
    assert circle.level(0).homology() == {0: "Z", 1: "Z"}

    crys = derham.free_crystalline_stub(1, 2, 1)
    assert crys.gr(1).homology() == {0: "Z^2"}

    try:
        derham.filtered_circle(1)
    except derham.PreconditionError:
        pass
    else:
        raise AssertionError("expected a precondition error")

    code, out = derham.run_cli(["power", "--kind", "sym", "--r", "2", "--json-in", "/nonexistent"])
    assert code == 2 and "error" in json.loads(out)

    print("python smoke test passed")


if __name__ == "__main__":
    main()
