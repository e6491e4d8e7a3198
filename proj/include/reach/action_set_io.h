#ifndef REACH_ACTION_SET_IO_H_
#define REACH_ACTION_SET_IO_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "reach/action_set.h"

namespace reach {

// Action-set config format (UTF-8, line oriented, '#' starts a comment):
//
//   [features]
//   name,type,lb,ub,actionable,sign        <- optional header row
//   Age,integer,19,75,no,
//   YearsAtResidence,integer,0,7,yes,+
//
//   [constraints]
//   linkage(source=YearsAtResidence, targets=[Age:1])
//   thermometer(features=[CheckingAcctExists, CheckingAcctGeq0], direction=increase)
//   one_hot(features=[Married, Single], min=0, max=1)
//   if_then(if=IsEmployed, geq=1, then=WorkHrsZero, value=0, on=value)
//   reachability(features=[A, B], values=[(0,0), (1,0)], edges=[11, 01])
//
// type is binary|integer, actionable is yes|no, sign is + | - | free (blank
// means free). Linkage scales are rationals ("1", "-3", "0.5", "1/3") and
// default to 1. one_hot limits default to min=0, max=1; if_then defaults to
// on=value. A record may span several lines until its parentheses balance.
//
// Malformed text raises ParseError with a line number; well-formed text that
// breaks an invariant raises ValidationError.
ActionSet ParseActionSet(std::string_view text);
ActionSet LoadActionSet(const std::filesystem::path& path);

// Canonical text form; ParseActionSet(SerializeActionSet(s)) == s.
std::string SerializeActionSet(const ActionSet& spec);

// 16 hex digits identifying the canonical serialization.
std::string SpecHash(const ActionSet& spec);

}  // namespace reach

#endif  // REACH_ACTION_SET_IO_H_
