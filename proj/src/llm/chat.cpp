#include "hintlab/llm/chat.hpp"

namespace hintlab::llm {

std::string role_name(Role r) {
  switch (r) {
    case Role::System:
      return "system";
    case Role::User:
      return "user";
    case Role::Assistant:
      return "assistant";
  }
  return "user";
}

}  // namespace hintlab::llm
