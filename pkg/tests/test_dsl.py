from hypothesis import given, settings
from hypothesis import strategies as st

from cape.dsl import (
    EditProgram,
    InsertWaypoint,
    ModifyRotation,
    ModifyTranslation,
    SelectPath,
    Wait,
    format_number,
    parse,
    print_program,
    print_statement,
)


def test_appendix_style_two_line_program():
    prog = parse('select_path(0, "robot")\nwait(2, 5, "robot")')
    assert prog.statements == (SelectPath(0, "robot"), Wait(2, 5, "robot"))
    assert prog.errors == ()


def test_insert_waypoint_with_theta():
    prog = parse('insert_waypoint(3, 120, 40, 90, "robot_1")')
    assert prog.statements == (InsertWaypoint(3, 120.0, 40.0, 90.0, "robot_1"),)


def test_insert_waypoint_without_theta():
    prog = parse("insert_waypoint(3, 120, 40, robot_1)")
    assert prog.statements == (InsertWaypoint(3, 120.0, 40.0, None, "robot_1"),)


def test_unknown_operation_marked_invalid():
    prog = parse('fly_to(1, "robot")')
    assert prog.statements == ()
    (err,) = prog.errors
    assert err.line == 1
    assert "UnknownOperation" in err.message


def test_bad_lines_do_not_stop_later_lines():
    text = "\n".join([
        'select_path(oops, "robot")',
        'wait(2, 5, "robot")',
        "modify_translation(1, 3, robot)",  # arity
        'modify_rotation(0, -45, "robot")',
    ])
    prog = parse(text)
    assert [l.span.line for l in prog.lines] == [1, 2, 3, 4]
    assert [l.valid for l in prog.lines] == [False, True, False, True]
    assert prog.statements == (Wait(2, 5, "robot"), ModifyRotation(0, -45.0, "robot"))


def test_error_line_numbers_survive_blanks_comments_and_fences():
    text = "```python\n\n# plan\nselect_path(0, r)\nnonsense here\n```\n"
    prog = parse(text)
    assert len(prog.lines) == 2
    assert prog.lines[0].span.line == 4
    assert prog.lines[0].valid
    assert prog.lines[1].span.line == 5
    assert not prog.lines[1].valid


def test_negative_step_is_invalid():
    prog = parse('wait(-1, 5, "robot")')
    assert prog.statements == ()
    assert "non-negative" in prog.errors[0].message


def test_fractional_step_is_invalid():
    assert parse('modify_rotation(1.5, 10, "robot")').statements == ()


def test_non_integer_wait_duration_is_invalid():
    assert parse('wait(1, 2.5, "robot")').statements == ()


def test_quoted_agent_with_comma_inside():
    prog = parse('select_path(1, "a,b")')
    assert prog.statements == (SelectPath(1, "a,b"),)


def test_single_quoted_agent():
    prog = parse("select_path(1, 'robot')")
    assert prog.statements == (SelectPath(1, "robot"),)


def test_empty_agent_is_invalid():
    assert parse('select_path(1, "")').statements == ()


def test_canonical_print_examples():
    assert print_statement(SelectPath(0, "r")) == 'select_path(0, "r")'
    assert (print_statement(ModifyTranslation(1, 10.0, -2.5, "robot"))
            == 'modify_translation(1, 10, -2.5, "robot")')
    assert (print_statement(InsertWaypoint(2, 5.0, 6.0, None, "h"))
            == 'insert_waypoint(2, 5, 6, "h")')


def test_format_number_avoids_exponent_notation():
    s = format_number(1e-05)
    assert "e" not in s and float(s) == 1e-05
    s = format_number(3e20)
    assert "e" not in s and float(s) == 3e20


finite = st.floats(allow_nan=False, allow_infinity=False)
agents = st.from_regex(r"[A-Za-z_][A-Za-z0-9_]{0,11}", fullmatch=True)
steps = st.integers(0, 99)

statements = st.one_of(
    st.builds(SelectPath, st.integers(0, 9), agents),
    st.builds(ModifyTranslation, steps, finite, finite, agents),
    st.builds(ModifyRotation, steps, finite, agents),
    st.builds(Wait, steps, st.integers(0, 999), agents),
    st.builds(InsertWaypoint, steps, finite, finite, st.none() | finite, agents),
)


@given(st.lists(statements, max_size=8))
@settings(max_examples=300)
def test_parse_print_parse_identity(stmts):
    prog = EditProgram.from_statements(stmts)
    text = print_program(prog)
    once = parse(text)
    assert once.statements == tuple(stmts)
    assert parse(print_program(once)).statements == once.statements


@given(st.text(max_size=400))
@settings(max_examples=300)
def test_parse_is_total(text):
    prog = parse(text)
    for line in prog.lines:
        assert (line.statement is None) != (line.error is None)


@given(st.lists(statements, max_size=5))
def test_fence_and_blank_insensitivity(stmts):
    base = print_program(EditProgram.from_statements(stmts))
    wrapped = "```python\n\n" + base + "\n\n```\n"
    assert parse(wrapped).statements == parse(base).statements
