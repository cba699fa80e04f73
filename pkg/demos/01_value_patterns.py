"""
Abstracting raw parameter values into class patterns
====================================================

Values observed for one API parameter usually share a shape even when no
two of them are equal. Mapping characters to classes (lowercase -> x,
uppercase -> X, digit -> d, CJK ideograph -> z, anything else kept) and
collapsing runs turns "13812345678" and "13900001111" into the same
pattern "d".
"""

from apifk.param_abstraction import (
    abstract_pattern,
    common_subsequence,
    compress,
    map_chunk,
    reduce_partials,
    representative_examples,
    transform,
)

phone_numbers = ["13812345678", "13900001111", "18677775555"]
template_codes = ["SMS_100000", "SMS_100001", "SMS_100005"]
sign_names = ["AcmeCorp", "OpsAlert", "BulkNotify"]

for value in phone_numbers + template_codes + sign_names:
    print(f"{value:14s} -> {transform(value):14s} -> {abstract_pattern(value)}")

# compress only collapses runs; structure survives
print()
print("compress('XXX_dddddd') =", compress("XXX_dddddd"))

# the shared-skeleton view: a common subsequence of every template code
print("common subsequence of template codes:", common_subsequence(template_codes))

# The map/reduce split: each chunk is summarized independently, then the
# partial summaries merge into one profile. Patterns and length counts are
# exact multiset sums, so chunking never changes them.
chunk_a = map_chunk(template_codes[:2])
chunk_b = map_chunk(template_codes[2:])
profile = reduce_partials([chunk_a, chunk_b])

print()
print("merged profile for TemplateCode:")
print("  patterns:", profile.patterns)
print("  lengths:", profile.lengths)
print("  subsequence:", profile.common_subsequence)

# examples shown to a user come only from values matching the top pattern
print("  examples:", representative_examples(template_codes, profile))
