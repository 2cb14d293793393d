import unittest

from fwlasso import StandardizationMode, SamplingMode, SolverType, CDOrder, StopReason, TraceLevel


class TestEnums(unittest.TestCase):
    def setUp(self):
        self.enums = [StandardizationMode, SamplingMode, SolverType, CDOrder, StopReason, TraceLevel]

    def test_from_string_method(self):
        for enum in self.enums:
            for member in enum:
                self.assertEqual(enum.from_str(str(member)), member)
                self.assertEqual(enum.from_str(str(member).upper()), member)

    def test_from_string_invalid(self):
        for enum in self.enums:
            with self.assertRaises(ValueError):
                enum.from_str("not-a-member")

    def test_descriptions(self):
        for enum in (StandardizationMode, SamplingMode, SolverType):
            for member in enum:
                self.assertEqual(int(member), member.value)
                self.assertTrue(member.get_description())

    def test_standardization_names(self):
        self.assertEqual(str(StandardizationMode.UNIT_NORM_COLUMNS), 'unit')
        self.assertEqual(StandardizationMode.from_str('center'), StandardizationMode.CENTER_AND_UNIT_NORM)
        self.assertEqual(StandardizationMode.from_str('center_and_unit_norm'), StandardizationMode.CENTER_AND_UNIT_NORM)
        self.assertFalse(StandardizationMode.NONE.centers_response)

    def test_solver_families(self):
        self.assertTrue(SolverType.FW.is_constrained)
        self.assertFalse(SolverType.CD.is_constrained)
        self.assertFalse(SolverType.SCD.is_constrained)

    def test_trace_level_order(self):
        self.assertLess(TraceLevel.NONE, TraceLevel.SUMMARY)
        self.assertGreaterEqual(TraceLevel.ITERATION, TraceLevel.SUMMARY)
        self.assertGreaterEqual(TraceLevel.SUMMARY, TraceLevel.SUMMARY)


if __name__ == '__main__':
    unittest.main()
