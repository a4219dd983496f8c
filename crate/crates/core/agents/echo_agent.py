#!/usr/bin/env python3
"""Reference external agent: predicts the last observed signal.

Speaks the line-delimited JSON agent protocol on stdin/stdout. The extra
flags inject faults for testing the harness.
"""

import argparse
import json
import os
import signal
import sys


def send(msg):
    sys.stdout.write(json.dumps(msg) + "\n")
    sys.stdout.flush()


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--name", default="echo")
    parser.add_argument("--tokens", type=int, default=1, help="tokens reported per prediction")
    parser.add_argument("--die-after", type=int, help="SIGKILL itself after N predictions")
    parser.add_argument("--garbage-after", type=int, help="send a non-numeric prediction after N predictions")
    parser.add_argument("--bad-handshake", action="store_true")
    parser.add_argument("--hang-after", type=int, help="stop answering after N predictions")
    args = parser.parse_args()

    answered = 0
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        msg = json.loads(line)
        kind = msg.get("type")
        if kind == "hello":
            if args.bad_handshake:
                sys.stdout.write("hello yourself\n")
                sys.stdout.flush()
            else:
                send({"type": "ready", "name": args.name})
        elif kind == "predict":
            if args.die_after is not None and answered >= args.die_after:
                os.kill(os.getpid(), signal.SIGKILL)
            if args.hang_after is not None and answered >= args.hang_after:
                signal.pause()
            if args.garbage_after is not None and answered >= args.garbage_after:
                send({"type": "prediction", "value": "forty-two", "tokens_used": 1})
            else:
                send({"type": "prediction", "value": msg["signal"], "tokens_used": args.tokens})
            answered += 1
        elif kind == "bye":
            break


if __name__ == "__main__":
    main()
