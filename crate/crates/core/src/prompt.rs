//! The test-generation prompt.

const TEMPLATE: &str = "Below is a question and it's corresponding code answer. \n\
Please write test cases to check the correctness of the code answer. \n\
You need to use the unittest library in Python and create a test class for testing.\n\
\n\
IMPORTANT: Return ONLY valid Python code in a single ```python ... ``` code block. \n\
Do NOT include any explanations, analysis, or extra text outside the code block.\n\
\n\
### question\n\
{QUESTION_TEXT}\n\
\n\
### code solution\n\
{SOLUTION_CODE}\n\
\n\
Please add detailed comments.\n";

/// Fills the template verbatim; neither argument is escaped.
pub fn render_prompt(question: &str, solution: &str) -> String {
    let (head, rest) = TEMPLATE.split_once("{QUESTION_TEXT}").expect("template placeholder");
    let (mid, tail) = rest.split_once("{SOLUTION_CODE}").expect("template placeholder");
    let mut out = String::with_capacity(TEMPLATE.len() + question.len() + solution.len());
    out.push_str(head);
    out.push_str(question);
    out.push_str(mid);
    out.push_str(solution);
    out.push_str(tail);
    out
}
