#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

namespace prefixopt
{

struct Rejection
{
  std::string reason;
};

/// Either a value or the reason an edit was refused. Edits that fail their
/// preconditions return a rejection and leave the input untouched.
template<typename T>
class Outcome
{
public:
  Outcome( T value ) : state_( std::move( value ) ) {}
  Outcome( Rejection rejection ) : state_( std::move( rejection ) ) {}

  bool ok() const { return std::holds_alternative<T>( state_ ); }
  explicit operator bool() const { return ok(); }

  T const& value() const&
  {
    if ( !ok() )
      throw std::logic_error( "Outcome::value on rejection: " + reason() );
    return std::get<T>( state_ );
  }
  T&& value() &&
  {
    if ( !ok() )
      throw std::logic_error( "Outcome::value on rejection: " + reason() );
    return std::get<T>( std::move( state_ ) );
  }

  T const& operator*() const& { return value(); }
  T const* operator->() const { return &value(); }

  std::string const& reason() const
  {
    static std::string const none;
    return ok() ? none : std::get<Rejection>( state_ ).reason;
  }

private:
  std::variant<T, Rejection> state_;
};

inline Rejection reject( std::string reason ) { return Rejection{ std::move( reason ) }; }

} // namespace prefixopt
