"""Static client-side scripts the services hand out.

Real players ship a minified bundle; the auditor only cares whether the
bundle looks minified and whether key material leaks into it, so the
stub keeps exactly those two properties and nothing else.
"""

MINIFIED_BANNER = "/*! player bundle - minified, do not edit */"


def render_client_script(lines: list[str]) -> bytes:
    body = MINIFIED_BANNER + "\n" + ";".join(lines) + ";\n"
    return body.encode("utf-8")
