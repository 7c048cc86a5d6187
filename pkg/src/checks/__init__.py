from src.checks.report import CheckReport, Violation, merge_reports

__all__ = ["CheckReport", "Violation", "merge_reports"]
