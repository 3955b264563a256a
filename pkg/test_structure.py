"""
Test script to verify the modular structure is working correctly
"""

import sys


def test_imports():
    """Test that all modules can be imported"""
    try:
        from config.settings import config  # noqa: F401
        print("✓ config.settings imported successfully")

        from config.constants import CHECK_NAMES  # noqa: F401
        print("✓ config.constants imported successfully")

        from algebra.series import ScalarSeries  # noqa: F401
        from algebra.lie import LieAlgebra  # noqa: F401
        from algebra.enveloping import EnvelopingAlgebra  # noqa: F401
        print("✓ algebra imported successfully")

        from twist.hpoly import HPoly  # noqa: F401
        from twist.twists import FormalTwist  # noqa: F401
        from twist.solver import TwistSolver  # noqa: F401
        print("✓ twist imported successfully")

        from linfty.engine import TaylorCoderivation  # noqa: F401
        from linfty.hosts import SchoutenHost  # noqa: F401
        print("✓ linfty imported successfully")

        from quantize.polynomials import PolynomialAlgebra  # noqa: F401
        from quantize.hochschild import PolyDiffOperator  # noqa: F401
        from quantize.star import StarProduct  # noqa: F401
        print("✓ quantize imported successfully")

        from service.problem import load_problem  # noqa: F401
        from service.pipelines import COMMANDS  # noqa: F401
        import service.app  # noqa: F401
        print("✓ service imported successfully")
        ok = True
    except ImportError as e:
        print(f"✗ Import error: {e}")
        ok = False
    assert ok


def test_config():
    """Test configuration loading"""
    from config.settings import Config, parse_degree_schedule

    fresh = Config()
    assert fresh.get("truncation_order") == 6
    assert fresh.get("coherence_max_k") == 3
    assert fresh.get("coherence_max_l") == 2
    assert fresh.get("sample_degree") == 5
    assert fresh.get("degree_schedule") == ""
    assert parse_degree_schedule("2:4, 3:7") == {2: 4, 3: 7}
    try:
        parse_degree_schedule("2")
        raised = False
    except ValueError:
        raised = True
    assert raised
    print("✓ Configuration loaded correctly")


def test_commands_and_checks():
    """Every batch command is wired and the check names are stable"""
    from config.constants import CHECK_NAMES, EXIT_CODES
    from service.pipelines import COMMANDS

    assert set(COMMANDS) == {"verify", "quantize", "twist-solve"}
    assert CHECK_NAMES[0] == "lie_algebra" and CHECK_NAMES[-1] == "twisted_coproduct_iterates"
    assert EXIT_CODES == {"PASS": 0, "CHECK_FAILED": 1, "USAGE": 2}
    print("✓ Commands and check names are in place")


def main():
    """Run all tests"""
    print("Testing modular structure...")
    print("=" * 50)

    tests = [
        test_imports,
        test_config,
        test_commands_and_checks,
    ]

    passed = 0
    for test in tests:
        try:
            test()
            passed += 1
        except AssertionError as e:
            print(f"✗ {test.__name__} failed: {e}")

    print("=" * 50)
    print(f"Tests passed: {passed}/{len(tests)}")
    return passed == len(tests)


if __name__ == '__main__':
    sys.exit(0 if main() else 1)
