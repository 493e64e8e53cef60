
# exit codes shared by every console command
__exit_codes__ = {
    "ok": 0,
    "check-failed": 1,
    "budget": 2,
    "violation": 3,
    "illegitimate": 4,
    "usage": 64
}

# rule-set mutations, used as negative controls
__mutations__ = {
    "drop-U2": "U2 removed: a wrong parent with a correct d is never repaired",
    "drop-B2": "B2 removed: a wrong parent with a correct d is never repaired",
    "drop-B3": "B3 removed: processes surrounded by d=D neighbors keep their value",
    "weaken-B3": "B3 guard without d_p != D: a process already at D stays enabled"
}

# ansi colors for human readable reports on stderr
__colors__ = {
    "error": "31",
    "warning": "33",
    "info": "36",
    "success": "32"
}
