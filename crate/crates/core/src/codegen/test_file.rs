//! Scenario replay tests: init, enter, assert the initial state, then one
//! setter call and one active-state assertion per scenario step.

use std::fmt::Write;

use crate::model::{StateRef, Value};
use crate::scenario::BoundScenario;

use super::machine::c_value;
use super::{banner, CodegenError, NamingScheme, TestFlavor};

pub(crate) fn test_source(
    bound: &BoundScenario,
    n: &NamingScheme,
    flavor: TestFlavor,
) -> Result<String, CodegenError> {
    for (i, step) in bound.steps().iter().enumerate() {
        if let Value::Int(v) = step.input {
            if i32::try_from(v).is_err() {
                return Err(CodegenError::Range {
                    value: v,
                    context: format!("scenario input {i} for `{}`", step.variable),
                });
            }
        }
    }

    let mut out = banner();
    out.push_str("#include <stdio.h>\n#include <stdlib.h>\n");
    out.push_str("#include \"src-gen/sc_types.h\"\n");
    writeln!(out, "#include \"src-gen/{}.h\"", n.handle_type()).unwrap();

    let indent = match flavor {
        TestFlavor::Gtest => {
            out.push_str("#include \"testinglib/gtest/gtest.h\"\n\n");
            out.push_str("class TestStateMachine: public ::testing::Test {\n");
            out.push_str("    protected:\n");
            writeln!(out, "        {} handle;", n.handle_type()).unwrap();
            out.push_str("};\n\n");
            writeln!(out, "TEST_F(TestStateMachine, test{}) {{", n.prefix).unwrap();
            "    "
        }
        TestFlavor::Minimal => {
            out.push_str("\nstatic int checks = 0;\nstatic int failures = 0;\n\n");
            out.push_str("#define EXPECT_TRUE(cond) \\\n");
            out.push_str("    do { \\\n");
            out.push_str("        checks++; \\\n");
            out.push_str("        if (!(cond)) { \\\n");
            out.push_str("            failures++; \\\n");
            out.push_str(
                "            printf(\"%s:%d: expectation failed: %s\\n\", __FILE__, __LINE__, #cond); \\\n",
            );
            out.push_str("        } \\\n");
            out.push_str("    } while (0)\n\n");
            out.push_str("int main(void)\n{\n");
            writeln!(out, "    {} handle;\n", n.handle_type()).unwrap();
            "    "
        }
    };

    let assert_line = |state: &StateRef| {
        format!(
            "{indent}EXPECT_TRUE({}(&handle, {}));\n",
            n.is_active(),
            n.state_const(state)
        )
    };
    writeln!(out, "{indent}{}(&handle);", n.init()).unwrap();
    writeln!(out, "{indent}{}(&handle);\n", n.enter()).unwrap();
    out.push_str(&assert_line(&bound.initial_expectation()));
    for step in bound.steps() {
        writeln!(
            out,
            "\n{indent}{}(&handle, {});",
            n.setter(&step.variable),
            c_value(step.input)
        )
        .unwrap();
        out.push_str(&assert_line(&step.expected));
    }

    match flavor {
        TestFlavor::Gtest => out.push_str("}\n"),
        TestFlavor::Minimal => {
            out.push_str("\n    printf(\"%d checks, %d failures\\n\", checks, failures);\n");
            out.push_str("    return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;\n}\n");
        }
    }
    Ok(out)
}
