"""
Prompts, completions and relaxed matching
=========================================

Assemble a few-shot prompt, fake a completion, and score the answer.
"""

from chartshot.answer_eval import extract_final_answer, relaxed_match
from chartshot.prompt_kit import assemble_prompt, build_prompt_spec, builtin_demonstrations, verify_ccr_arithmetic

table = "Country | Score <0x0A> Iraq (purple) | 8.3 <0x0A> Gabon (teal) | 6.8"
question = "What is the average of Iraq and Gabon?"

spec = build_prompt_spec("FCQA", "FewShot", question, table=table)
prompt = assemble_prompt(spec)
print(prompt[-300:])

# demonstrations carry step-by-step answers whose arithmetic can be audited
for demo in builtin_demonstrations("FCQA"):
    for claim in verify_ccr_arithmetic(demo.ccr):
        print(demo.index, claim.expression, "=", claim.stated, "ok" if claim.ok else "WRONG")

# a made-up completion in the same style
completion = "Iraq is 8.3 and Gabon is 6.8. So ( 8.3 + 6.8 ) / 2 = 7.55. The answer is 7.55."
answer = extract_final_answer(completion)
print("extracted", answer, "->", relaxed_match(answer, "7.55"))

# the 5% relative tolerance in action
for pred in ("7.2", "7.17", "7.9"):
    print(pred, relaxed_match(pred, "7.55"))
