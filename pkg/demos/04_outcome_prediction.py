# Train the character-level predictor on a simulated log and ask it, before
# "sending" anything, how a few requests would come out.
#
# The tiny variant keeps this desk-sized: the run takes on the order of a
# minute on one CPU core. Pass more epochs / records for better numbers.

import numpy as np

from apifk.char_predictor import TrainCfg, precision, serialize_request, train
from apifk.char_predictor.model import predict_batch
from apifk.log_model import ApiCallRecord
from apifk.simulator import generate, sms_scenario

records = generate(sms_scenario(seed=7), 3000)
labels = sorted({r.outcome.code for r in records})
print("outcome classes:", labels)

# the model reads the serialized request, last characters first
print("model input example:", serialize_request(records[0])[:70], "...")

order = np.random.default_rng(0).permutation(len(records))
held_out = [records[i] for i in order[:300]]
train_set = [records[i] for i in order[300:]]

# small minibatch: at 2700 records the default 128 would give the optimizer
# only ~21 steps per epoch
model, history = train(records=train_set, variant="tiny",
                       cfg=TrainCfg(epochs=4, minibatch=32, seed=0))
for epoch in history:
    print(f"epoch {epoch['epoch']}: lr={epoch['lr']:.4f} "
          f"loss={epoch['train_loss']:.3f} acc={epoch['train_accuracy']:.3f}")

predicted = [label for label, _, _ in predict_batch(model, held_out)]
actual = [r.outcome.code for r in held_out]
report = precision(predicted, actual)
print(f"held-out precision: {report.overall:.3f} over {report.total} calls")

# now probe hand-written requests. The quantizer anchors characters at the
# end of the request, so probes follow the mined value shapes (6-digit code,
# 11-character phone) to stay aligned with what the model trained on.
probes = [
    ("clean request", ApiCallRecord.make("SendSms", {
        "PhoneNumbers": "13812345678", "SignName": "AcmeCorp",
        "TemplateCode": "SMS_100001", "TemplateParam": '{"code":"471100"}',
    })),
    ("forbidden sign name", ApiCallRecord.make("SendSms", {
        "PhoneNumbers": "13812345678", "SignName": "forbidden",
        "TemplateCode": "SMS_100001", "TemplateParam": '{"code":"471100"}',
    })),
    ("sign name missing", ApiCallRecord.make("SendSms", {
        "PhoneNumbers": "13812345678",
        "TemplateCode": "SMS_100001", "TemplateParam": '{"code":"471100"}',
    })),
    ("bad template prefix", ApiCallRecord.make("SendSms", {
        "PhoneNumbers": "13812345678", "SignName": "AcmeCorp",
        "TemplateCode": "BAD_SMS_100001", "TemplateParam": '{"code":"471100"}',
    })),
]
results = predict_batch(model, [rec for _, rec in probes])
for (what, _), (label, p, _) in zip(probes, results):
    print(f"{what:20s} -> {label} (p={p:.2f})")

# One class is still beyond this two-minute training run: letters hidden in
# the phone number. That field is random digits to begin with, and its
# position relative to the end of the request shifts with the sign-name
# length, so the net needs far more examples to isolate it. The release-gate
# run (10k records, 4 full epochs) reaches held-out precision > 0.99 and
# does pick it up.
