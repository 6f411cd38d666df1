from src.decorators import is_self_check, self_check


class TestDecorators:
    # Test that the self_check decorator marks the function with _is_self_check.
    def test_self_check_marks_function(self):

        @self_check
        def mock_check(context):
            return True, "ok"

        assert hasattr(mock_check, "_is_self_check")
        assert mock_check._is_self_check is True
        assert is_self_check(mock_check)

    # Test that the decorator returns the original function.
    def test_self_check_returns_original_function(self):

        def original_check(context):
            return True, "ok"

        decorated = self_check(original_check)
        assert decorated is original_check
        assert decorated(None) == (True, "ok")

    # Test that unmarked callables and non-callables are not treated as checks.
    def test_is_self_check_rejects_unmarked(self):

        def plain(context):
            return True, ""

        assert not is_self_check(plain)
        assert not is_self_check("mixing_matrices")
        assert not is_self_check(None)
