//! Prompt templates and response extraction.

pub const SYSTEM_PROMPT: &str = "You are an expert in Lean 4 and formal specification.";

pub const REQUIREMENT_SLOT: &str = "{requirement}";

pub const FORMALIZE_TEMPLATE: &str = "\
# Formalize the following requirement using Lean syntax:
{requirement}

Translate the natural language requirement into a formal Lean 4 proposition. The result should be a `def` statement that defines a proposition (`Prop`).

Complete the following code and substitute the brackets with appropriate variables from requirements:

The definition should have the following structure:

```lean4
-- define variables here
variable (<VARIABLE> : <TYPE>)
variable (<VARIABLE> : <TYPE>)

def <ACTION_name_FOR_function> : Prop :=
-- include all conditions in the given here and finally they should either imply or not imply the action
(CONDITION A \\land CONDITION B \\land ...) -> ACTION
```
";

pub const PROVE_PREAMBLE: &str = "\
Given the following Lean code, reason out and finally prove that either:
- the given two functions are logically equivalent and consistent
- the given two functions are inconsistent

Continue and complete the theorem based on the provided code:

```lean4
";

pub fn render_formalize_prompt(requirement: &str) -> String {
    FORMALIZE_TEMPLATE.replacen(REQUIREMENT_SLOT, requirement, 1)
}

/// The theorem is left open after `:= by` for the model to continue.
pub fn render_prove_prompt(theorem_text: &str) -> String {
    let body = theorem_text.trim_end();
    let body = body.strip_suffix("sorry").map_or(body, str::trim_end);
    format!("{PROVE_PREAMBLE}{body}\n")
}

pub fn correction_prompt(problem: &str) -> String {
    format!(
        "The Lean code above could not be used: {problem}\n\
         Reply with one ```lean4 code block containing `variable` declarations and a single \
         `def <name> : Prop :=` built only from Bool, integer and enumerated variables, \
         comparisons with integer constants, ¬, ∧, ∨, → and ↔."
    )
}

/// Body of the first fenced block tagged `lean4`.
pub fn extract_lean_block(response: &str) -> Option<String> {
    let mut lines = response.lines();
    while let Some(line) = lines.next() {
        let t = line.trim_start();
        let Some(info) = t.strip_prefix("```") else { continue };
        if info.trim() != "lean4" {
            continue;
        }
        let mut body = Vec::new();
        for l in lines.by_ref() {
            if l.trim_start().starts_with("```") {
                return Some(body.join("\n") + "\n");
            }
            body.push(l);
        }
        // Unterminated fence: take the rest.
        return Some(body.join("\n") + "\n");
    }
    None
}
