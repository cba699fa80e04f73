# Mine a simulated call log: which parameter combinations are used, which
# parameters take values from a small fixed set, and which are required.
#
# The simulator plays the role of a gateway log export. Everything below
# also works on a real log loaded with apifk.log_model.read_log.

from apifk.param_sequences import mine_sequences
from apifk.pipeline import mine_knowledge
from apifk.simulator import generate, sms_scenario

scenario = sms_scenario(seed=7)
records = generate(scenario, 2000)
print(f"simulated {len(records)} calls across {len(scenario.catalog)} APIs")

# 1. parameter sequences: the distinct sorted name sets per API, with rates
stats = mine_sequences(records)
for key, count, rate in stats.rows("SendSms"):
    print(f"  SendSms {rate:5.1%}  {'+'.join(key.params)}  ({count} calls)")

# 2. the full knowledge pass: value patterns, enums, ranges, requiredness
knowledge = mine_knowledge(records, catalog=scenario.catalog)
send = knowledge["SendSms"]

print()
print("SendSms parameters:")
for name, param in sorted(send.params.items()):
    bits = []
    if param.required:
        bits.append("required")
    if param.enum_values is not None:
        bits.append(f"enum {param.enum_values}")
    if param.numeric_range is not None:
        lo, hi = param.numeric_range
        bits.append(f"range [{lo}, {hi}]")
    print(f"  {name:14s} {', '.join(bits) or 'free-form'}")

# QuerySendDetails carries the numeric paging parameters
query = knowledge["QuerySendDetails"]
for name in ("PageSize", "CurrentPage"):
    print(f"  QuerySendDetails.{name} range:", query.params[name].numeric_range)

# TemplateParam is optional by construction: the 30% sequence omits it and
# those calls still succeed, so requiredness (measured over successes only)
# stays False.
print()
print("TemplateParam required:", send.params["TemplateParam"].required)
print("SignName required:", send.params["SignName"].required)
